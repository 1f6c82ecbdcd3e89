#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbpv/densem.hpp"
#include "cbpv/generator.hpp"
#include "cbpv/opsem.hpp"
#include "cbpv/term.hpp"

namespace cbpv::harness {

enum class Verdict {
  ExactMatch,
  ConvergentMatch,
  /// Neither side is exact and the two lower bounds are still eps apart.
  Inconclusive,
  Violation,
};
const char* to_string(Verdict v);

struct DenotationalResult {
  Rational value = 0;
  bool exact = false;
  std::size_t rec_depth = 0;
};

struct AdequacyReport {
  std::string id;
  opsem::LimitResult operational;
  DenotationalResult denotational;
  Verdict verdict = Verdict::Inconclusive;
  /// |operational - denotational|.
  Rational gap = 0;
  std::string details;
};

struct AdequacyOptions {
  Rational epsilon = Rational(1, 1000000);
  std::uint64_t max_steps = 1000000;
  /// Largest rec depth tried; depths double from 1.
  std::size_t max_rec_depth = 64;
  bool memoize = false;
};

/// Runs both semantics on a ground M : F V unit and compares them. Throws
/// typing::TypeErrorException on a wrong type and Error on an open term.
AdequacyReport adequacy_check(const Term& m, const AdequacyOptions& options = {}, std::string id = {});

/// h* of the value at increasing rec depths until one is exact or the cap is
/// reached. Throws RepresentationError if the sequence ever decreases.
DenotationalResult denotational_probability(const Term& m, std::size_t max_rec_depth = 64);

struct RegressionCase {
  std::string name;
  Term term;
  /// Expected Pr for F V unit cases.
  std::optional<Rational> probability;
  /// Whether that probability is reached by a finite derivation.
  bool finitely_reached = false;
  std::string note;
};

/// The rejection sampler on {0, 1, 2}, of type V int.
Term rejection_sampler();
/// produce (do x <- sampler; [x = outcome] ret * else diverge), of type F V unit.
Term sampler_outcome(long outcome);
/// thunk fun m n. pifz m (produce 0) (pifz n (produce 0) omega).
Term parallel_or_thunk();
/// The pair of F unit programs told apart only by a parallel P.
Term pifz_witness_m(const Term& p);
Term pifz_witness_n(const Term& p);
/// thunk fun y : V unit. obs[b](produce y); produce ret *.
Term threshold_thunk(const Rational& b);
/// The two functions of type U(V unit -> F V unit) -> F V unit told apart
/// only by a statistical tester.
Term tester_witness_m();
Term tester_witness_n();
/// M to z : unit in produce ret *, for M : F unit.
Term observe_unit(const Term& m);

std::vector<RegressionCase> regression_corpus();

struct CorpusEntry {
  std::string id;
  std::string source;
  /// From "# expect key: value" header lines.
  std::map<std::string, std::string> expect;
};

/// Reads the "# expect" headers out of a program text.
CorpusEntry corpus_entry(std::string id, std::string source);
/// Throws Error when the file cannot be read.
CorpusEntry load_corpus_file(const std::filesystem::path& path);
/// Every *.cbpv file under dir, sorted by name.
std::vector<CorpusEntry> load_corpus_dir(const std::filesystem::path& dir);

/// Blank-line separated key=value group.
std::string to_records(const AdequacyReport& r);
std::string to_human(const AdequacyReport& r);

/// "p/q (0.xxxxxx)".
std::string format_probability(const Rational& q);

}  // namespace cbpv::harness
