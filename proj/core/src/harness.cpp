#include "cbpv/harness.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cbpv/derived.hpp"
#include "cbpv/typing.hpp"

namespace cbpv::harness {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ExactMatch: return "ExactMatch";
    case Verdict::ConvergentMatch: return "ConvergentMatch";
    case Verdict::Inconclusive: return "Inconclusive";
    case Verdict::Violation: return "Violation";
  }
  return "?";
}

DenotationalResult denotational_probability(const Term& m, std::size_t max_rec_depth) {
  DenotationalResult out;
  std::optional<Rational> previous;
  for (std::size_t depth = 1;; depth = std::min(depth * 2, max_rec_depth)) {
    auto r = densem::evaluate(m, {}, densem::EvalConfig{depth});
    Rational h = densem::hstar(r.value);
    if (previous && h < *previous) {
      throw densem::RepresentationError("h* decreased from " + to_fraction_string(*previous) + " to " +
                                        to_fraction_string(h) + " at rec depth " + std::to_string(depth));
    }
    previous = h;
    out = DenotationalResult{h, r.exact, depth};
    if (r.exact || depth >= max_rec_depth) break;
  }
  return out;
}

AdequacyReport adequacy_check(const Term& m, const AdequacyOptions& options, std::string id) {
  Type t = typing::type_of(m);
  if (t != fvunit()) {
    throw typing::TypeErrorException(typing::TypeError{"expected F V unit, got " + t.str(), {}, m.span()});
  }
  if (!m.closed()) throw Error("adequacy check needs a ground term");

  AdequacyReport r;
  r.id = std::move(id);
  opsem::LimitOptions lo;
  lo.epsilon = options.epsilon;
  lo.max_steps = options.max_steps;
  lo.memoize = options.memoize;
  r.operational = opsem::pr_limit(m, lo);
  r.denotational = denotational_probability(m, options.max_rec_depth);

  const Rational& op = r.operational.lower;
  const Rational& den = r.denotational.value;
  r.gap = abs(op - den);
  const bool op_exact = r.operational.exact;
  const bool den_exact = r.denotational.exact;
  if (op_exact && den_exact) {
    r.verdict = r.gap == 0 ? Verdict::ExactMatch : Verdict::Violation;
    if (r.gap != 0) r.details = "both sides exact but different";
  } else if (den_exact && op > den) {
    r.verdict = Verdict::Violation;
    r.details = "operational lower bound exceeds the exact denotational value";
  } else if (op_exact && den > op) {
    r.verdict = Verdict::Violation;
    r.details = "denotational approximant exceeds the exact operational value";
  } else if (r.gap < options.epsilon) {
    r.verdict = Verdict::ConvergentMatch;
  } else {
    r.verdict = Verdict::Inconclusive;
    r.details = "approximants still " + to_decimal_string(r.gap) + " apart";
  }
  return r;
}

Term rejection_sampler() {
  Variable u{"u", Type::v(Type::integer())};
  auto ret = [](long n) { return Term::ret(Term::num(n)); };
  return Term::rec(u, Term::pchoice(Term::pchoice(ret(0), ret(1)), Term::pchoice(ret(2), Term::var(u))));
}

Term sampler_outcome(long outcome) {
  Variable x{"x", Type::integer()};
  Term test = Term::var(x);
  for (long i = 0; i < outcome; ++i) test = Term::pred(test);
  Term body = Term::ifz(test, Term::ret(Term::star()), derived::omega(Type::v(Type::unit())));
  return Term::produce(Term::do_(x, rejection_sampler(), body));
}

Term parallel_or_thunk() {
  Variable m{"m", Type::integer()};
  Variable n{"n", Type::integer()};
  Term zero = Term::produce(Term::num(0L));
  Term inner = Term::pifz(Term::var(n), zero, derived::omega(Type::f(Type::integer())));
  return Term::thunk(Term::lam(m, Term::lam(n, Term::pifz(Term::var(m), zero, inner))));
}

namespace {

Term call2(const Term& p, const Term& a, const Term& b) { return Term::app(Term::app(Term::force(p), a), b); }

Term unit_done() { return Term::produce(Term::star()); }

}  // namespace

Term pifz_witness_m(const Term& p) {
  Term omega = derived::omega(Type::integer());
  Term zero = Term::num(0L);
  return derived::eq0_and(call2(p, omega, zero), derived::eq0_and(call2(p, zero, omega), unit_done()));
}

Term pifz_witness_n(const Term& p) {
  Term omega = derived::omega(Type::integer());
  return derived::and_then(pifz_witness_m(p), derived::eq0_and(call2(p, omega, omega), unit_done()));
}

Term threshold_thunk(const Rational& b) {
  Variable y{"y", Type::v(Type::unit())};
  Term body = Term::seq(Term::obs(b, Term::produce(Term::var(y))), Term::produce(Term::ret(Term::star())));
  return Term::thunk(Term::lam(y, body));
}

namespace {

Type tester_arg_type() { return Type::u(Type::arrow(Type::v(Type::unit()), fvunit())); }

}  // namespace

Term tester_witness_m() {
  Variable g{"g", tester_arg_type()};
  Term arg = Term::pchoice(derived::omega(Type::v(Type::unit())), Term::ret(Term::star()));
  return Term::lam(g, Term::app(Term::force(Term::var(g)), arg));
}

Term tester_witness_n() {
  Variable g{"g", tester_arg_type()};
  Variable y{"y", Type::v(Type::unit())};
  Term call = Term::app(Term::force(Term::var(g)), derived::omega(Type::v(Type::unit())));
  return Term::lam(g, Term::to(call, y, Term::produce(Term::pchoice(Term::var(y), Term::ret(Term::star())))));
}

Term observe_unit(const Term& m) {
  Variable z{"z", Type::unit()};
  return Term::to(m, z, Term::produce(Term::ret(Term::star())));
}

std::vector<RegressionCase> regression_corpus() {
  std::vector<RegressionCase> out;
  out.push_back({"sampler", rejection_sampler(), std::nullopt, false, "uniform on {0, 1, 2}; each outcome has mass 1/3"});
  for (long i = 0; i < 3; ++i) {
    out.push_back({"sampler-outcome-" + std::to_string(i), sampler_outcome(i), Rational(1, 3), false,
                   "depth-k lower bound (1/3)(1 - (1/4)^k)"});
  }
  Term pg = parallel_or_thunk();
  out.push_back({"pifz-witness-m", observe_unit(pifz_witness_m(pg)), Rational(1), true, "denotation {T}"});
  out.push_back({"pifz-witness-n", observe_unit(pifz_witness_n(pg)), Rational(0), false, "denotation bottom"});
  Term pb = threshold_thunk(Rational(1, 4));
  out.push_back({"tester-witness-m", Term::app(tester_witness_m(), pb), Rational(1), true, "h* = 1"});
  out.push_back({"tester-witness-n", Term::app(tester_witness_n(), pb), Rational(0), false, "h* = 0"});
  out.push_back({"abort", Term::abort(fvunit()), Rational(1), true, "empty set"});
  out.push_back({"omega", derived::omega(fvunit()), Rational(0), false, "bottom"});
  out.push_back({"half-omega",
                 Term::produce(Term::pchoice(Term::ret(Term::star()), derived::omega(Type::v(Type::unit())))),
                 Rational(1, 2), false, "{1/2 T}"});
  return out;
}

CorpusEntry corpus_entry(std::string id, std::string source) {
  CorpusEntry e;
  e.id = std::move(id);
  e.source = std::move(source);
  std::istringstream lines(e.source);
  std::string line;
  const std::string tag = "# expect ";
  while (std::getline(lines, line)) {
    if (line.rfind(tag, 0) != 0) continue;
    std::string rest = line.substr(tag.size());
    auto colon = rest.find(':');
    if (colon == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto en = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, en - b + 1);
    };
    e.expect[trim(rest.substr(0, colon))] = trim(rest.substr(colon + 1));
  }
  return e;
}

CorpusEntry load_corpus_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return corpus_entry(path.stem().string(), buf.str());
}

std::vector<CorpusEntry> load_corpus_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cbpv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CorpusEntry> out;
  for (const auto& f : files) out.push_back(load_corpus_file(f));
  return out;
}

std::string format_probability(const Rational& q) {
  return to_fraction_string(q) + " (" + to_decimal_string(q, 6) + ")";
}

std::string to_records(const AdequacyReport& r) {
  std::ostringstream out;
  out << "id=" << r.id << "\n"
      << "verdict=" << to_string(r.verdict) << "\n"
      << "operational=" << to_fraction_string(r.operational.lower) << "\n"
      << "operational_exact=" << (r.operational.exact ? "true" : "false") << "\n"
      << "operational_status=" << opsem::to_string(r.operational.status) << "\n"
      << "steps=" << r.operational.steps_used << "\n"
      << "denotational=" << to_fraction_string(r.denotational.value) << "\n"
      << "denotational_exact=" << (r.denotational.exact ? "true" : "false") << "\n"
      << "rec_depth=" << r.denotational.rec_depth << "\n"
      << "gap=" << to_fraction_string(r.gap) << "\n";
  if (!r.details.empty()) out << "details=" << r.details << "\n";
  return out.str();
}

std::string to_human(const AdequacyReport& r) {
  std::ostringstream out;
  if (!r.id.empty()) out << r.id << ": ";
  out << to_string(r.verdict) << "\n"
      << "  operational   Pr >= " << format_probability(r.operational.lower) << " ["
      << opsem::to_string(r.operational.status) << ", " << r.operational.steps_used << " steps]\n"
      << "  denotational  h* = " << format_probability(r.denotational.value) << " ["
      << (r.denotational.exact ? "exact" : "approximate") << ", rec depth " << r.denotational.rec_depth << "]\n";
  if (!r.details.empty()) out << "  " << r.details << "\n";
  return out.str();
}

}  // namespace cbpv::harness
