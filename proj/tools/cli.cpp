#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "cbpv/densem.hpp"
#include "cbpv/generator.hpp"
#include "cbpv/harness.hpp"
#include "cbpv/opsem.hpp"
#include "cbpv/parser.hpp"
#include "cbpv/printer.hpp"
#include "cbpv/typing.hpp"

namespace cbpv::cli {

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kParse = 2;

enum class Format { Human, Records };

struct Options {
  std::string epsilon = "1/1000000";
  std::uint64_t max_budget = 1000000;
  std::size_t rec_depth = 64;
  std::uint64_t seed = 1;
  bool trace = false;
  std::string format = "human";
  std::string input;
  std::string expr;

  // fuzz
  std::size_t count = 200;
  int depth = 5;
  double rec_probability = 0.2;
  // trace
  std::uint64_t trace_depth = 32;

  Rational eps;
  Format fmt = Format::Human;
};

struct Source {
  std::string id;
  std::string text;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class Session {
 public:
  Session(const Options& o, std::istream& in, std::ostream& out, std::ostream& err)
      : o_(o), in_(in), out_(out), err_(err) {}

  int check() {
    return guarded([&] {
      Source s = source();
      Term m = parse_term(s.text);
      auto r = typing::synth(m);
      if (!r.ok()) throw typing::TypeErrorException(r.error());
      if (records()) {
        out_ << "status=ok\ntype=" << r.type().str() << "\n";
      } else {
        out_ << r.type().str() << "\n";
      }
      return kOk;
    });
  }

  int run() {
    return guarded([&] {
      Term m = parse_term(source().text);
      opsem::LimitOptions lo = limit_options();
      if (o_.trace) lo.trace = &out_;
      auto r = opsem::pr_limit(m, lo);
      print_limit(r);
      return kOk;
    });
  }

  int trace() {
    return guarded([&] {
      Term m = parse_term(source().text);
      require_observable(m);
      Term core = typing::elaborate(m);
      opsem::ProbOptions po;
      po.step_limit = o_.max_budget;
      po.trace = &out_;
      auto r = opsem::prob(opsem::initial(core), o_.trace_depth, po);
      if (records()) {
        out_ << "lower=" << to_fraction_string(r.lower) << "\nexact=" << bool_text(r.exact)
             << "\nsteps=" << r.steps_used << "\ntruncated=" << bool_text(r.truncated) << "\n";
      } else {
        out_ << "Pr >= " << harness::format_probability(r.lower) << (r.exact ? " (exact)" : "") << ", "
             << r.steps_used << " steps" << (r.truncated ? ", step cap reached" : "") << "\n";
      }
      return kOk;
    });
  }

  int eval() {
    return guarded([&] {
      Term m = parse_term(source().text);
      Type t = typing::type_of(m);
      if (!m.closed()) throw typing::TypeErrorException(typing::TypeError{"term is not closed", {}, m.span()});
      auto r = densem::evaluate(m, {}, densem::EvalConfig{o_.rec_depth});
      std::optional<Rational> h;
      if (t == fvunit()) h = densem::hstar(r.value);
      if (records()) {
        out_ << "type=" << t.str() << "\nvalue=" << r.value.str() << "\nexact=" << bool_text(r.exact)
             << "\nrec_depth=" << o_.rec_depth << "\n";
        if (h) out_ << "hstar=" << to_fraction_string(*h) << "\n";
      } else {
        out_ << r.value.str() << " : " << t.str() << (r.exact ? "" : " (approximate)") << "\n";
        if (h) out_ << "h* = " << harness::format_probability(*h) << "\n";
      }
      return kOk;
    });
  }

  int expand() {
    return guarded([&] {
      Term m = parse_term(source().text);
      out_ << print_term(m) << "\n";
      return kOk;
    });
  }

  int adequacy() {
    std::vector<harness::CorpusEntry> entries;
    int code = guarded([&] {
      if (o_.expr.empty() && !o_.input.empty() && o_.input != "-" && std::filesystem::is_directory(o_.input)) {
        entries = harness::load_corpus_dir(o_.input);
      } else {
        Source s = source();
        entries.push_back(harness::corpus_entry(s.id, s.text));
      }
      return kOk;
    });
    if (code != kOk) return code;
    std::map<harness::Verdict, std::size_t> tally;
    int worst = kOk;
    for (const auto& e : entries) {
      int c = guarded([&] {
        Term m = parse_term(e.source);
        auto r = harness::adequacy_check(m, adequacy_options(), e.id);
        ++tally[r.verdict];
        emit(r);
        std::string mismatch = expectation_mismatch(e, r);
        if (!mismatch.empty()) {
          err_ << e.id << ": expectation not met: " << mismatch << "\n";
          return kFailure;
        }
        return r.verdict == harness::Verdict::Violation ? kFailure : kOk;
      }, e.id);
      worst = std::max(worst, c);
    }
    if (entries.size() > 1 && !records()) summary(tally, entries.size());
    return worst;
  }

  int fuzz() {
    harness::GenPolicy policy;
    policy.max_depth = o_.depth;
    policy.rec_probability = o_.rec_probability;
    policy.seed = o_.seed;
    std::map<harness::Verdict, std::size_t> tally;
    int worst = kOk;
    return guarded([&] {
      harness::Generator gen(policy);
      for (std::size_t i = 0; i < o_.count; ++i) {
        Term m = gen.term(fvunit());
        std::string id = "fuzz-" + std::to_string(o_.seed) + "-" + std::to_string(i);
        auto r = harness::adequacy_check(m, adequacy_options(), id);
        ++tally[r.verdict];
        if (records()) {
          out_ << "term=" << print_term(m) << "\n";
          emit(r);
        } else if (r.verdict == harness::Verdict::Violation) {
          out_ << print_term(m) << "\n" << harness::to_human(r);
        }
        if (r.verdict == harness::Verdict::Violation) worst = kFailure;
      }
      if (!records()) summary(tally, o_.count);
      return worst;
    });
  }

 private:
  bool records() const { return o_.fmt == Format::Records; }
  static const char* bool_text(bool b) { return b ? "true" : "false"; }

  Source source() {
    if (!o_.expr.empty()) return {"<expr>", o_.expr};
    if (o_.input.empty()) throw InputError("no input: give a file, '-' for stdin, or --expr");
    if (o_.input == "-") {
      std::ostringstream buf;
      buf << in_.rdbuf();
      return {"<stdin>", buf.str()};
    }
    std::ifstream f(o_.input);
    if (!f) throw InputError("cannot read " + o_.input);
    std::ostringstream buf;
    buf << f.rdbuf();
    return {std::filesystem::path(o_.input).stem().string(), buf.str()};
  }

  void require_observable(const Term& m) {
    Type t = typing::type_of(m);
    if (t != fvunit()) {
      throw typing::TypeErrorException(typing::TypeError{"expected F V unit, got " + t.str(), {}, m.span()});
    }
    if (!m.closed()) throw typing::TypeErrorException(typing::TypeError{"term is not closed", {}, m.span()});
  }

  opsem::LimitOptions limit_options() const {
    opsem::LimitOptions lo;
    lo.epsilon = o_.eps;
    lo.max_steps = o_.max_budget;
    return lo;
  }

  harness::AdequacyOptions adequacy_options() const {
    harness::AdequacyOptions ao;
    ao.epsilon = o_.eps;
    ao.max_steps = o_.max_budget;
    ao.max_rec_depth = o_.rec_depth;
    return ao;
  }

  void print_limit(const opsem::LimitResult& r) {
    if (records()) {
      out_ << "lower=" << to_fraction_string(r.lower) << "\ndecimal=" << to_decimal_string(r.lower, 6)
           << "\nexact=" << bool_text(r.exact) << "\nstatus=" << opsem::to_string(r.status)
           << "\nsteps=" << r.steps_used << "\ndepth=" << r.depth << "\n";
    } else {
      out_ << "Pr ≥ " << to_fraction_string(r.lower) << " (" << opsem::to_string(r.status) << ")\n"
           << "  ≈ " << to_decimal_string(r.lower, 6) << ", " << r.steps_used << " steps, depth " << r.depth
           << "\n";
    }
  }

  void emit(const harness::AdequacyReport& r) {
    if (records()) {
      out_ << harness::to_records(r) << "\n";
    } else {
      out_ << harness::to_human(r);
    }
  }

  std::string expectation_mismatch(const harness::CorpusEntry& e, const harness::AdequacyReport& r) {
    std::string out;
    if (auto it = e.expect.find("verdict"); it != e.expect.end() && it->second != to_string(r.verdict)) {
      out += "verdict " + std::string(to_string(r.verdict)) + " != " + it->second + "; ";
    }
    if (auto it = e.expect.find("pr"); it != e.expect.end()) {
      Rational want = parse_rational(it->second);
      Rational gap = abs(r.operational.lower - want);
      if (!(gap == 0 || (!r.operational.exact && gap < o_.eps))) {
        out += "Pr " + to_fraction_string(r.operational.lower) + " != " + it->second + "; ";
      }
    }
    return out;
  }

  void summary(const std::map<harness::Verdict, std::size_t>& tally, std::size_t total) {
    out_ << total << " terms:";
    for (auto v : {harness::Verdict::ExactMatch, harness::Verdict::ConvergentMatch, harness::Verdict::Inconclusive,
                   harness::Verdict::Violation}) {
      auto it = tally.find(v);
      out_ << " " << to_string(v) << "=" << (it == tally.end() ? 0 : it->second);
    }
    out_ << "\n";
  }

  template <typename F>
  int guarded(F body, const std::string& id = {}) {
    std::string prefix = id.empty() ? "" : id + ": ";
    try {
      return body();
    } catch (const ParseError& e) {
      err_ << prefix << "parse error: " << e.what() << "\n";
      return kParse;
    } catch (const InputError& e) {
      err_ << prefix << e.what() << "\n";
      return kParse;
    } catch (const typing::TypeErrorException& e) {
      err_ << prefix << "type error: " << e.what() << "\n";
      return kFailure;
    } catch (const Error& e) {
      err_ << prefix << "error: " << e.what() << "\n";
      return kFailure;
    }
  }

  const Options& o_;
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"CBPV(D,P) with pifz and statistical termination testers"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;

  app.add_option("--epsilon", o.epsilon, "Convergence threshold (rational)")->envname("CBPVDP_EPSILON");
  app.add_option("--max-budget", o.max_budget, "Cap on machine steps")
      ->envname("CBPVDP_MAX_BUDGET")
      ->check(CLI::PositiveNumber);
  app.add_option("--rec-depth", o.rec_depth, "Fixpoint iterations per rec")
      ->envname("CBPVDP_REC_DEPTH")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", o.seed, "Generator seed")->envname("CBPVDP_SEED");
  app.add_flag("--trace", o.trace, "Print every machine step")->envname("CBPVDP_TRACE");
  app.add_option("--format", o.format, "Output format")
      ->envname("CBPVDP_FORMAT")
      ->check(CLI::IsMember({"human", "records"}));

  auto with_input = [&](CLI::App* sub) {
    sub->add_option("input", o.input, "Term file, or - for stdin");
    sub->add_option("-e,--expr", o.expr, "Inline term");
    return sub;
  };
  auto* check = with_input(app.add_subcommand("check", "Print the type of a term"));
  auto* run_cmd = with_input(app.add_subcommand("run", "Lower bound on the termination probability"));
  auto* eval = with_input(app.add_subcommand("eval", "Denotational value"));
  auto* adequacy = with_input(app.add_subcommand("adequacy", "Compare both semantics on a file or corpus directory"));
  auto* expand = with_input(app.add_subcommand("expand", "Print the term with derived forms expanded"));
  auto* trace = with_input(app.add_subcommand("trace", "Single budgeted pass printing every step"));
  trace->add_option("--depth", o.trace_depth, "Derivation depth")->check(CLI::PositiveNumber);
  auto* fuzz = app.add_subcommand("fuzz", "Adequacy check on generated terms");
  fuzz->add_option("--count", o.count, "Number of terms")->envname("CBPVDP_COUNT");
  fuzz->add_option("--depth", o.depth, "Maximum term depth")->check(CLI::Range(1, 64));
  fuzz->add_option("--rec-probability", o.rec_probability, "Chance of a rec at eligible positions")
      ->check(CLI::Range(0.0, 1.0));

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
    o.eps = parse_rational(o.epsilon);
    if (o.eps <= 0) throw CLI::ValidationError("--epsilon", "must be positive");
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParse;
  } catch (const std::invalid_argument& e) {
    err << "--epsilon: " << e.what() << "\n";
    return kParse;
  }
  o.fmt = o.format == "records" ? Format::Records : Format::Human;

  Session s(o, in, out, err);
  if (*check) return s.check();
  if (*run_cmd) return s.run();
  if (*eval) return s.eval();
  if (*adequacy) return s.adequacy();
  if (*expand) return s.expand();
  if (*trace) return s.trace();
  if (*fuzz) return s.fuzz();
  return kParse;
}

}  // namespace cbpv::cli
