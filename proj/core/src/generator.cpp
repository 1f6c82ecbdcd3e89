#include "cbpv/generator.hpp"

#include <cmath>
#include <functional>

#include "cbpv/typing.hpp"

namespace cbpv::harness {

namespace {

using Scope = std::vector<Variable>;

// Distributions in <random> are implementation-defined; these are not.
double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

struct Option {
  double weight;
  std::function<std::optional<Term>()> build;
};

}  // namespace

struct Generator::Impl {
  const GenPolicy& p;
  std::mt19937_64& rng;
  std::size_t counter = 0;

  Variable fresh(const Type& t) { return Variable{"x" + std::to_string(counter++), t}; }

  bool coin(double prob) { return prob > 0 && unit_interval(rng) < prob; }

  Type value_type(int size) {
    if (size <= 0) return below(rng, 2) ? Type::integer() : Type::unit();
    switch (below(rng, 7)) {
      case 0:
      case 1: return Type::unit();
      case 2: return Type::integer();
      case 3:
      case 4: return Type::v(value_type(size - 1));
      case 5: return Type::prod(value_type(size - 1), value_type(size - 1));
      default: return Type::u(computation_type(size - 1));
    }
  }

  Type computation_type(int size) {
    if (size <= 0 || below(rng, 4) != 0) return Type::f(value_type(size - 1));
    return Type::arrow(value_type(size - 1), computation_type(size - 1));
  }

  std::optional<Term> pick(std::vector<Option> options) {
    while (!options.empty()) {
      double total = 0;
      for (const auto& o : options) total += o.weight;
      if (total <= 0) return std::nullopt;
      double r = unit_interval(rng) * total;
      std::size_t i = 0;
      for (; i + 1 < options.size(); ++i) {
        if (r < options[i].weight) break;
        r -= options[i].weight;
      }
      if (auto t = options[i].build()) return t;
      options.erase(options.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return std::nullopt;
  }

  void add_variables(std::vector<Option>& out, const Type& t, const Scope& scope) {
    const double w = p.weights.variable;
    if (w <= 0) return;
    for (const auto& x : scope) {
      if (x.type == t) out.push_back({w, [x] { return Term::var(x); }});
    }
  }

  Term literal_int() {
    long span = p.literal_max - p.literal_min + 1;
    long n = p.literal_min + (span > 0 ? static_cast<long>(below(rng, static_cast<std::size_t>(span))) : 0);
    return Term::num(n);
  }

  // Minimal inhabitants only.
  std::optional<Term> leaf(const Type& t, const Scope& scope) {
    std::vector<Option> options;
    add_variables(options, t, scope);
    const double lit = p.weights.literal;
    switch (t.kind()) {
      case TypeKind::Unit:
        options.push_back({lit, [] { return Term::star(); }});
        break;
      case TypeKind::Int:
        options.push_back({lit, [this] { return literal_int(); }});
        break;
      case TypeKind::Prod:
        options.push_back({lit, [=, this]() -> std::optional<Term> {
                             auto a = leaf(t.first(), scope);
                             if (!a) return std::nullopt;
                             auto b = leaf(t.second(), scope);
                             if (!b) return std::nullopt;
                             return Term::pair(*a, *b);
                           }});
        break;
      case TypeKind::V:
        options.push_back({lit, [=, this]() -> std::optional<Term> {
                             auto a = leaf(t.first(), scope);
                             if (!a) return std::nullopt;
                             return Term::ret(*a);
                           }});
        break;
      case TypeKind::U:
        options.push_back({lit, [=, this]() -> std::optional<Term> {
                             auto a = leaf(t.first(), scope);
                             if (!a) return std::nullopt;
                             return Term::thunk(*a);
                           }});
        break;
      case TypeKind::F:
        options.push_back({lit, [=, this]() -> std::optional<Term> {
                             auto a = leaf(t.first(), scope);
                             if (!a) return std::nullopt;
                             return Term::produce(*a);
                           }});
        options.push_back({p.weights.abort, [t] { return Term::abort(t); }});
        break;
      case TypeKind::Arrow:
        options.push_back({lit, [=, this]() -> std::optional<Term> {
                             Variable x = fresh(t.first());
                             Scope inner = scope;
                             inner.push_back(x);
                             auto body = leaf(t.second(), inner);
                             if (!body) return std::nullopt;
                             return Term::lam(x, *body);
                           }});
        options.push_back({p.weights.abort, [t] { return Term::abort(t); }});
        break;
    }
    return pick(std::move(options));
  }

  std::optional<Term> rec_at(const Type& t, int depth, const Scope& scope) {
    Variable x = fresh(t);
    Scope inner = scope;
    inner.push_back(x);
    std::optional<Term> body;
    if (coin(p.guard_probability)) {
      auto with_x = [&]() -> std::optional<Term> {
        if (coin(0.5)) return Term::var(x);
        return gen(t, depth - 1, inner, true);
      };
      auto without = gen(t, depth - 1, scope, true);
      if (!without) return std::nullopt;
      auto guarded = with_x();
      if (!guarded) return std::nullopt;
      if (t.kind() == TypeKind::V) {
        body = coin(0.5) ? Term::pchoice(*without, *guarded) : Term::pchoice(*guarded, *without);
      } else {
        auto c = gen(Type::integer(), depth - 1, inner, true);
        if (!c) return std::nullopt;
        body = Term::ifz(*c, *without, *guarded);
      }
    } else {
      body = gen(t, depth - 1, inner, true);
    }
    if (!body) return std::nullopt;
    return Term::rec(x, *body);
  }

  std::optional<Term> gen(const Type& t, int depth, const Scope& scope, bool in_rec) {
    if (depth <= 1) return leaf(t, scope);
    const int level = p.max_depth - depth;
    if (!in_rec && t.is_value() && t.first_order() && coin(p.rec_probability)) {
      if (auto r = rec_at(t, depth, scope)) return r;
    }
    const double scale = std::pow(p.decay, level);
    const int d = depth - 1;
    const auto& w = p.weights;
    std::vector<Option> options;
    options.push_back({w.literal + w.variable + w.abort, [=, this] { return leaf(t, scope); }});
    auto sub = [=, this](const Type& s, const Scope& sc) { return gen(s, d, sc, in_rec); };
    auto bin = [=, this](auto make, const Type& a, const Type& b) -> std::optional<Term> {
      auto x = sub(a, scope);
      if (!x) return std::nullopt;
      auto y = sub(b, scope);
      if (!y) return std::nullopt;
      return make(*x, *y);
    };
    auto add = [&](double weight, std::function<std::optional<Term>()> build) {
      if (weight > 0) options.push_back({weight * scale, std::move(build)});
    };

    add(w.ifz, [=, this]() -> std::optional<Term> {
      auto c = sub(Type::integer(), scope);
      if (!c) return std::nullopt;
      auto z = sub(t, scope);
      if (!z) return std::nullopt;
      auto n = sub(t, scope);
      if (!n) return std::nullopt;
      return Term::ifz(*c, *z, *n);
    });
    add(w.seq, [=, this] { return bin([](Term a, Term b) { return Term::seq(a, b); }, Type::unit(), t); });

    if (t.is_value()) {
      add(w.proj, [=, this]() -> std::optional<Term> {
        Type other = value_type(0);
        bool left = coin(0.5);
        auto m = sub(left ? Type::prod(t, other) : Type::prod(other, t), scope);
        if (!m) return std::nullopt;
        return left ? Term::proj1(*m) : Term::proj2(*m);
      });
    }

    switch (t.kind()) {
      case TypeKind::Unit:
        add(w.obs, [=, this]() -> std::optional<Term> {
          static const Rational bounds[] = {Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(2, 3),
                                            Rational(3, 4)};
          Rational b = bounds[below(rng, 5)];
          auto m = sub(fvunit(), scope);
          if (!m) return std::nullopt;
          return Term::obs(b, *m);
        });
        break;
      case TypeKind::Int:
        add(w.succ_pred, [=, this]() -> std::optional<Term> {
          bool up = coin(0.5);
          auto m = sub(Type::integer(), scope);
          if (!m) return std::nullopt;
          return up ? Term::succ(*m) : Term::pred(*m);
        });
        break;
      case TypeKind::Prod:
        add(w.pair, [=, this] { return bin([](Term a, Term b) { return Term::pair(a, b); }, t.first(), t.second()); });
        break;
      case TypeKind::V:
        add(w.literal, [=, this]() -> std::optional<Term> {
          auto m = sub(t.first(), scope);
          if (!m) return std::nullopt;
          return Term::ret(*m);
        });
        add(w.pchoice, [=, this] { return bin([](Term a, Term b) { return Term::pchoice(a, b); }, t, t); });
        add(w.do_, [=, this]() -> std::optional<Term> {
          Variable x = fresh(value_type(1));
          auto m = sub(Type::v(x.type), scope);
          if (!m) return std::nullopt;
          Scope inner = scope;
          inner.push_back(x);
          auto n = sub(t, inner);
          if (!n) return std::nullopt;
          return Term::do_(x, *m, *n);
        });
        break;
      case TypeKind::U:
        add(w.literal, [=, this]() -> std::optional<Term> {
          auto m = sub(t.first(), scope);
          if (!m) return std::nullopt;
          return Term::thunk(*m);
        });
        break;
      case TypeKind::F:
      case TypeKind::Arrow:
        if (t.kind() == TypeKind::F) {
          add(w.literal, [=, this]() -> std::optional<Term> {
            auto m = sub(t.first(), scope);
            if (!m) return std::nullopt;
            return Term::produce(*m);
          });
          add(w.nchoice, [=, this] { return bin([](Term a, Term b) { return Term::nchoice(a, b); }, t, t); });
        } else {
          add(w.literal, [=, this]() -> std::optional<Term> {
            Variable x = fresh(t.first());
            Scope inner = scope;
            inner.push_back(x);
            auto body = sub(t.second(), inner);
            if (!body) return std::nullopt;
            return Term::lam(x, *body);
          });
        }
        add(w.pifz, [=, this]() -> std::optional<Term> {
          auto c = sub(Type::integer(), scope);
          if (!c) return std::nullopt;
          auto z = sub(t, scope);
          if (!z) return std::nullopt;
          auto n = sub(t, scope);
          if (!n) return std::nullopt;
          return Term::pifz(*c, *z, *n);
        });
        add(w.to, [=, this]() -> std::optional<Term> {
          Variable x = fresh(value_type(1));
          auto m = sub(Type::f(x.type), scope);
          if (!m) return std::nullopt;
          Scope inner = scope;
          inner.push_back(x);
          auto n = sub(t, inner);
          if (!n) return std::nullopt;
          return Term::to(*m, x, *n);
        });
        add(w.force, [=, this]() -> std::optional<Term> {
          auto m = sub(Type::u(t), scope);
          if (!m) return std::nullopt;
          return Term::force(*m);
        });
        add(w.app, [=, this]() -> std::optional<Term> {
          Type a = value_type(1);
          return bin([](Term f, Term x) { return Term::app(f, x); }, Type::arrow(a, t), a);
        });
        break;
    }
    return pick(std::move(options));
  }

  std::optional<Frame> frame_for(const Type& result) {
    const int d = std::max(1, p.max_depth - 1);
    std::vector<std::function<std::optional<Frame>()>> kinds;
    auto ground = [&](const Type& t, const Scope& scope) { return gen(t, d, scope, false); };
    kinds.push_back([&]() -> std::optional<Frame> {
      auto z = ground(result, {});
      auto n = ground(result, {});
      if (!z || !n) return std::nullopt;
      return Frame::ifz(*z, *n);
    });
    kinds.push_back([&]() -> std::optional<Frame> {
      auto n = ground(result, {});
      if (!n) return std::nullopt;
      return Frame::seq(*n);
    });
    if (result.is_computation()) {
      kinds.push_back([&]() -> std::optional<Frame> {
        auto a = ground(value_type(1), {});
        if (!a) return std::nullopt;
        return Frame::app_arg(*a);
      });
      kinds.push_back([&]() -> std::optional<Frame> { return Frame::force(); });
      if (result.kind() == TypeKind::F) {
        kinds.push_back([&]() -> std::optional<Frame> {
          Variable x = fresh(value_type(1));
          auto n = ground(result, {x});
          if (!n) return std::nullopt;
          return Frame::to(x, *n);
        });
      }
    } else {
      if (result == Type::integer()) {
        kinds.push_back([&]() -> std::optional<Frame> { return coin(0.5) ? Frame::succ() : Frame::pred(); });
      }
      kinds.push_back([&]() -> std::optional<Frame> {
        Type other = value_type(0);
        return coin(0.5) ? Frame::proj1(other) : Frame::proj2(other);
      });
      if (result.kind() == TypeKind::V) {
        kinds.push_back([&]() -> std::optional<Frame> {
          Variable x = fresh(value_type(1));
          auto n = ground(result, {x});
          if (!n) return std::nullopt;
          return Frame::do_(x, *n);
        });
      }
    }
    return kinds[below(rng, kinds.size())]();
  }
};

Generator::Generator(GenPolicy policy) : policy_(std::move(policy)), rng_(policy_.seed) {
  if (policy_.max_depth < 1) throw GenerationError("generation depth must be at least 1");
}

Term Generator::term(const Type& t) {
  Impl impl{policy_, rng_};
  auto m = impl.gen(t, policy_.max_depth, {}, false);
  if (!m) throw GenerationError("no term of type " + t.str() + " within depth " + std::to_string(policy_.max_depth));
  Type got = typing::type_of(*m);
  if (got != t) throw std::logic_error("generator produced " + got.str() + " for " + t.str());
  return *m;
}

Type Generator::value_type(int size) {
  Impl impl{policy_, rng_};
  return impl.value_type(size);
}

Type Generator::computation_type(int size) {
  Impl impl{policy_, rng_};
  return impl.computation_type(size);
}

std::pair<EvalContext, Type> Generator::context(std::size_t max_frames) {
  Impl impl{policy_, rng_};
  static const InitialKind initials[] = {InitialKind::Hole, InitialKind::Hole, InitialKind::Produce,
                                         InitialKind::ProduceRet};
  EvalContext c(initials[below(rng_, 4)]);
  Type hole = typing::check_context(c).type();
  std::size_t frames = max_frames ? below(rng_, max_frames + 1) : 0;
  for (std::size_t i = 0, tries = 0; i < frames && tries < 4 * max_frames + 4; ++tries) {
    auto f = impl.frame_for(hole);
    if (!f) continue;
    EvalContext next = c.push(*f);
    auto r = typing::check_context(next);
    if (!r.ok()) continue;
    c = next;
    hole = r.type();
    ++i;
  }
  return {c, hole};
}

Term generate(const GenPolicy& policy, const Type& t) { return Generator(policy).term(t); }

}  // namespace cbpv::harness
