#include "cbpv/densem.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "cbpv/typing.hpp"

namespace cbpv::densem {

struct Sem::Node {
  SemKind kind;
  bool top = false;
  std::optional<BigInt> number;
  std::vector<Sem> kids;
  std::vector<std::pair<Rational, Sem>> support;
  SemFn fn;
  std::optional<Sem> constant;
  bool comparable = true;
  std::string text;
};

namespace {

std::shared_ptr<Sem::Node> fresh(SemKind k) {
  auto n = std::make_shared<Sem::Node>();
  n->kind = k;
  return n;
}

[[noreturn]] void mismatch(const std::string& what) { throw RepresentationError("representation mismatch: " + what); }

bool leq_struct(const Sem& a, const Sem& b);

}  // namespace

Sem Sem::unit(bool top) {
  static const Sem t = [] {
    auto n = fresh(SemKind::Unit);
    n->top = true;
    n->text = "⊤";
    return Sem(n);
  }();
  static const Sem f = [] {
    auto n = fresh(SemKind::Unit);
    n->text = "⊥";
    return Sem(n);
  }();
  return top ? t : f;
}

Sem Sem::integer(std::optional<BigInt> value) {
  auto n = fresh(SemKind::Int);
  n->text = value ? value->get_str() : "⊥";
  n->number = std::move(value);
  return Sem(n);
}

Sem Sem::pair(Sem a, Sem b) {
  auto n = fresh(SemKind::Pair);
  n->comparable = a.comparable() && b.comparable();
  n->text = "(" + a.str() + ", " + b.str() + ")";
  n->kids = {std::move(a), std::move(b)};
  return Sem(n);
}

Sem Sem::val(std::vector<std::pair<Rational, Sem>> support) {
  auto n = fresh(SemKind::Val);
  std::vector<std::pair<Rational, Sem>> kept;
  Rational total = 0;
  bool comparable = true;
  for (auto& [w, p] : support) {
    w.canonicalize();
    if (w < 0) throw RepresentationError("negative weight in a valuation");
    if (w == 0) continue;
    total += w;
    comparable = comparable && p.comparable();
    kept.emplace_back(w, std::move(p));
  }
  if (total > 1) throw RepresentationError("valuation mass exceeds 1: " + to_fraction_string(total));
  if (comparable) {
    std::map<std::string, std::size_t> index;
    std::vector<std::pair<Rational, Sem>> merged;
    for (auto& [w, p] : kept) {
      auto it = index.find(p.str());
      if (it == index.end()) {
        index.emplace(p.str(), merged.size());
        merged.emplace_back(w, p);
      } else {
        merged[it->second].first += w;
      }
    }
    std::sort(merged.begin(), merged.end(), [](const auto& x, const auto& y) { return x.second.str() < y.second.str(); });
    kept = std::move(merged);
  }
  n->comparable = comparable;
  if (kept.empty()) {
    n->text = "0";
  } else {
    n->text = "{";
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (i) n->text += ", ";
      n->text += to_fraction_string(kept[i].first) + "·" + kept[i].second.str();
    }
    n->text += "}";
  }
  n->support = std::move(kept);
  return Sem(n);
}

Sem Sem::fbot() {
  static const Sem b = [] {
    auto n = fresh(SemKind::FBot);
    n->text = "⊥";
    return Sem(n);
  }();
  return b;
}

Sem Sem::fset(std::vector<Sem> generators) {
  auto n = fresh(SemKind::FSet);
  bool comparable = true;
  for (const auto& g : generators) comparable = comparable && g.comparable();
  if (comparable && generators.size() > 1) {
    std::map<std::string, Sem> unique;
    for (auto& g : generators) unique.emplace(g.str(), g);
    std::vector<Sem> distinct;
    for (auto& [k, g] : unique) distinct.push_back(g);
    std::vector<Sem> minimal;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      bool dominated = false;
      for (std::size_t j = 0; j < distinct.size() && !dominated; ++j) {
        if (i != j && leq_struct(distinct[j], distinct[i])) dominated = true;
      }
      if (!dominated) minimal.push_back(distinct[i]);
    }
    generators = std::move(minimal);
  }
  n->comparable = comparable;
  if (generators.empty()) {
    n->text = "∅";
  } else {
    n->text = "↑{";
    for (std::size_t i = 0; i < generators.size(); ++i) {
      if (i) n->text += ", ";
      n->text += generators[i].str();
    }
    n->text += "}";
  }
  n->kids = std::move(generators);
  return Sem(n);
}

Sem Sem::function(SemFn fn) {
  auto n = fresh(SemKind::Fun);
  n->fn = std::move(fn);
  n->comparable = false;
  n->text = "<fun>";
  return Sem(n);
}

Sem Sem::constant(Sem value) {
  auto n = fresh(SemKind::Fun);
  n->fn = [value](const Sem&) { return value; };
  n->constant = std::move(value);
  n->comparable = false;
  n->text = "<fun>";
  return Sem(n);
}

SemKind Sem::kind() const { return node_->kind; }

bool Sem::is_top_unit() const { return node_->kind == SemKind::Unit && node_->top; }

const std::optional<BigInt>& Sem::int_value() const {
  if (kind() != SemKind::Int) mismatch("expected an integer, got " + str());
  return node_->number;
}

const Sem& Sem::first() const {
  if (kind() != SemKind::Pair) mismatch("expected a pair, got " + str());
  return node_->kids[0];
}

const Sem& Sem::second() const {
  if (kind() != SemKind::Pair) mismatch("expected a pair, got " + str());
  return node_->kids[1];
}

const std::vector<std::pair<Rational, Sem>>& Sem::support() const {
  if (kind() != SemKind::Val) mismatch("expected a valuation, got " + str());
  return node_->support;
}

const std::vector<Sem>& Sem::generators() const {
  if (kind() != SemKind::FSet) mismatch("expected a finitely generated set, got " + str());
  return node_->kids;
}

const std::optional<Sem>& Sem::constant_value() const {
  if (kind() != SemKind::Fun) mismatch("expected a function, got " + str());
  return node_->constant;
}

bool Sem::comparable() const { return node_->comparable; }

const std::string& Sem::str() const { return node_->text; }

Rational Sem::mass() const {
  Rational total = 0;
  for (const auto& [w, p] : support()) total += w;
  return total;
}

std::string to_string(const Sem& v) { return v.str(); }

Sem apply(const Sem& f, const Sem& arg) {
  if (f.kind() != SemKind::Fun) mismatch("applying a non-function " + f.str());
  return f.node().fn(arg);
}

Sem bottom(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Unit: return Sem::unit(false);
    case TypeKind::Int: return Sem::integer(std::nullopt);
    case TypeKind::Prod: return Sem::pair(bottom(t.first()), bottom(t.second()));
    case TypeKind::V: return Sem::val({});
    case TypeKind::U: return bottom(t.first());
    case TypeKind::F: return Sem::fbot();
    case TypeKind::Arrow: return Sem::constant(bottom(t.second()));
  }
  throw std::logic_error("unknown type");
}

Sem top(const Type& t) {
  switch (t.kind()) {
    case TypeKind::F: return Sem::empty_set();
    case TypeKind::Arrow: return Sem::constant(top(t.second()));
    default: throw RepresentationError("top is only defined at computation types, got " + t.str());
  }
}

namespace {

bool is_top_at(const Sem& v) {
  if (v.kind() == SemKind::FSet) return v.generators().empty();
  if (v.kind() == SemKind::Fun && v.constant_value()) return is_top_at(*v.constant_value());
  return false;
}

bool is_bottom_at(const Sem& v) {
  if (v.kind() == SemKind::FBot) return true;
  if (v.kind() == SemKind::Fun && v.constant_value()) return is_bottom_at(*v.constant_value());
  return false;
}

}  // namespace

Sem meet(const Sem& a, const Sem& b, const Type& t) {
  switch (t.kind()) {
    case TypeKind::F: {
      for (const Sem* s : {&a, &b}) {
        if (s->kind() != SemKind::FBot && s->kind() != SemKind::FSet) {
          throw RepresentationError("meet at " + t.str() + " got " + s->str());
        }
      }
      if (a.kind() == SemKind::FBot || b.kind() == SemKind::FBot) return Sem::fbot();
      std::vector<Sem> gens = a.generators();
      const auto& more = b.generators();
      gens.insert(gens.end(), more.begin(), more.end());
      return Sem::fset(std::move(gens));
    }
    case TypeKind::Arrow: {
      if (is_top_at(a) || is_bottom_at(b)) return b;
      if (is_top_at(b) || is_bottom_at(a)) return a;
      Type codomain = t.second();
      if (a.constant_value() && b.constant_value()) {
        return Sem::constant(meet(*a.constant_value(), *b.constant_value(), codomain));
      }
      return Sem::function([a, b, codomain](const Sem& x) { return meet(apply(a, x), apply(b, x), codomain); });
    }
    default:
      throw RepresentationError("meet is only defined at computation types, got " + t.str());
  }
}

Sem qstar(const SemFn& f, const Sem& q, const Type& t) {
  if (q.kind() == SemKind::FBot) return bottom(t);
  const auto& gens = q.generators();
  if (gens.empty()) return top(t);
  Sem acc = f(gens[0]);
  for (std::size_t i = 1; i < gens.size(); ++i) {
    if (t.kind() == TypeKind::F && acc.kind() == SemKind::FBot) return acc;
    acc = meet(acc, f(gens[i]), t);
  }
  return acc;
}

Sem scale(const Sem& nu, const Rational& factor) {
  std::vector<std::pair<Rational, Sem>> out;
  for (const auto& [w, p] : nu.support()) out.emplace_back(w * factor, p);
  return Sem::val(std::move(out));
}

Sem add(const Sem& a, const Sem& b) {
  std::vector<std::pair<Rational, Sem>> out = a.support();
  const auto& more = b.support();
  out.insert(out.end(), more.begin(), more.end());
  return Sem::val(std::move(out));
}

Sem vdagger(const SemFn& f, const Sem& nu) {
  std::vector<std::pair<Rational, Sem>> out;
  for (const auto& [w, p] : nu.support()) {
    Sem image = f(p);
    for (const auto& [w2, p2] : image.support()) out.emplace_back(w * w2, p2);
  }
  return Sem::val(std::move(out));
}

Rational integrate(const std::function<Rational(const Sem&)>& h, const Sem& nu) {
  Rational total = 0;
  for (const auto& [w, p] : nu.support()) total += w * h(p);
  return total;
}

Rational top_mass(const Sem& nu) {
  Rational total = 0;
  for (const auto& [w, p] : nu.support()) {
    if (p.kind() != SemKind::Unit) mismatch("expected a valuation over unit, got " + nu.str());
    if (p.is_top_unit()) total += w;
  }
  return total;
}

Rational hstar(const Sem& q) {
  if (q.kind() == SemKind::FBot) return 0;
  const auto& gens = q.generators();
  if (gens.empty()) return 1;
  Rational best = top_mass(gens[0]);
  for (std::size_t i = 1; i < gens.size(); ++i) {
    Rational m = top_mass(gens[i]);
    if (m < best) best = m;
  }
  return best;
}

namespace {

// nu <= nu' iff all of nu's mass can be moved upward into nu' without
// exceeding any of nu''s weights: a max-flow question on the bipartite graph
// of the order between the two supports.
bool val_leq(const Sem& a, const Sem& b) {
  const auto& left = a.support();
  const auto& right = b.support();
  if (a.mass() > b.mass()) return false;
  if (a.comparable() && b.comparable() && a.str() == b.str()) return true;
  const std::size_t n = left.size();
  const std::size_t m = right.size();
  const std::size_t source = n + m;
  const std::size_t sink = n + m + 1;
  const std::size_t size = n + m + 2;
  std::vector<std::vector<Rational>> cap(size, std::vector<Rational>(size, Rational(0)));
  std::vector<std::vector<std::size_t>> adj(size);
  auto edge = [&](std::size_t u, std::size_t v, const Rational& c) {
    cap[u][v] += c;
    adj[u].push_back(v);
    adj[v].push_back(u);
  };
  for (std::size_t i = 0; i < n; ++i) edge(source, i, left[i].first);
  for (std::size_t j = 0; j < m; ++j) edge(n + j, sink, right[j].first);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (leq_struct(left[i].second, right[j].second)) edge(i, n + j, left[i].first);
    }
  }
  Rational flow = 0;
  for (;;) {
    std::vector<std::ptrdiff_t> parent(size, -1);
    parent[source] = static_cast<std::ptrdiff_t>(source);
    std::deque<std::size_t> queue{source};
    while (!queue.empty() && parent[sink] < 0) {
      std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : adj[u]) {
        if (parent[v] < 0 && cap[u][v] > 0) {
          parent[v] = static_cast<std::ptrdiff_t>(u);
          queue.push_back(v);
        }
      }
    }
    if (parent[sink] < 0) break;
    Rational push = -1;
    for (std::size_t v = sink; v != source; v = static_cast<std::size_t>(parent[v])) {
      std::size_t u = static_cast<std::size_t>(parent[v]);
      if (push < 0 || cap[u][v] < push) push = cap[u][v];
    }
    for (std::size_t v = sink; v != source; v = static_cast<std::size_t>(parent[v])) {
      std::size_t u = static_cast<std::size_t>(parent[v]);
      cap[u][v] -= push;
      cap[v][u] += push;
    }
    flow += push;
  }
  return flow == a.mass();
}

bool leq_struct(const Sem& a, const Sem& b) {
  if (a.kind() == SemKind::Fun || b.kind() == SemKind::Fun) {
    throw RepresentationError("the order on function values is not decidable");
  }
  bool a_f = a.kind() == SemKind::FBot || a.kind() == SemKind::FSet;
  bool b_f = b.kind() == SemKind::FBot || b.kind() == SemKind::FSet;
  if (a_f && b_f) {
    if (a.kind() == SemKind::FBot) return true;
    if (b.kind() == SemKind::FBot) return false;
    for (const auto& y : b.generators()) {
      bool covered = false;
      for (const auto& x : a.generators()) {
        if (leq_struct(x, y)) {
          covered = true;
          break;
        }
      }
      if (!covered) return false;
    }
    return true;
  }
  if (a.kind() != b.kind()) mismatch("comparing " + a.str() + " with " + b.str());
  switch (a.kind()) {
    case SemKind::Unit: return !a.is_top_unit() || b.is_top_unit();
    case SemKind::Int: return !a.int_value() || a.int_value() == b.int_value();
    case SemKind::Pair: return leq_struct(a.first(), b.first()) && leq_struct(a.second(), b.second());
    case SemKind::Val: return val_leq(a, b);
    default: mismatch("comparing " + a.str() + " with " + b.str());
  }
}

}  // namespace

bool leq(const Sem& a, const Sem& b, const Type& t) {
  if (!t.first_order()) throw RepresentationError("the order at " + t.str() + " is not decidable");
  return leq_struct(a, b);
}

bool sem_equal(const Sem& a, const Sem& b, const Type& t) { return leq(a, b, t) && leq(b, a, t); }

struct Env::Link {
  Variable x;
  Sem value;
  std::shared_ptr<const Link> next;
};

Env Env::bind(const Variable& x, Sem v) const {
  Env out;
  out.head_ = std::make_shared<const Link>(Link{x, std::move(v), head_});
  return out;
}

const Sem& Env::lookup(const Variable& x) const {
  for (const Link* l = head_.get(); l; l = l->next.get()) {
    if (l->x == x) return l->value;
  }
  throw Error("unbound variable " + x.name + " : " + x.type.str());
}

bool Env::contains(const Variable& x) const {
  for (const Link* l = head_.get(); l; l = l->next.get()) {
    if (l->x == x) return true;
  }
  return false;
}

namespace {

struct State {
  EvalConfig config;
  bool exact = true;
  // Keyed by node identity; the stored Term keeps the node alive.
  std::unordered_map<const void*, std::pair<Term, Type>> types;

  const Type& type_of(const Term& m) {
    auto it = types.find(m.identity());
    if (it == types.end()) it = types.emplace(m.identity(), std::make_pair(m, typing::type_of(m))).first;
    return it->second.second;
  }
};

Sem eval(const std::shared_ptr<State>& st, const Term& m, const Env& env) {
  switch (m.kind()) {
    case TermKind::Var:
      return env.lookup(m.variable());
    case TermKind::Star:
      return Sem::unit(true);
    case TermKind::Num:
      return Sem::integer(m.number());
    case TermKind::Abort:
      return top(m.abort_type());
    case TermKind::Lam: {
      Variable x = m.variable();
      Term body = m.child(0);
      return Sem::function([st, env, x, body](const Sem& v) { return eval(st, body, env.bind(x, v)); });
    }
    case TermKind::App:
      return apply(eval(st, m.child(0), env), eval(st, m.child(1), env));
    case TermKind::Rec: {
      const Variable& x = m.variable();
      const bool comparable = x.type.first_order();
      Sem v = bottom(x.type);
      for (std::size_t i = 0; i < st->config.rec_depth; ++i) {
        Sem next = eval(st, m.child(0), env.bind(x, v));
        if (comparable && next.str() == v.str()) return next;
        v = std::move(next);
        if (comparable && v.str().size() > st->config.max_iterate_size) break;
      }
      st->exact = false;
      return v;
    }
    case TermKind::Succ:
    case TermKind::Pred: {
      Sem n = eval(st, m.child(0), env);
      const auto& value = n.int_value();
      if (!value) return n;
      return Sem::integer(BigInt(*value + (m.is(TermKind::Succ) ? 1 : -1)));
    }
    case TermKind::Thunk:
    case TermKind::Force:
      return eval(st, m.child(0), env);
    case TermKind::Seq: {
      Sem u = eval(st, m.child(0), env);
      if (u.is_top_unit()) return eval(st, m.child(1), env);
      return bottom(st->type_of(m));
    }
    case TermKind::Ifz: {
      Sem n = eval(st, m.child(0), env);
      const auto& value = n.int_value();
      if (!value) return bottom(st->type_of(m));
      return eval(st, m.child(*value == 0 ? 1 : 2), env);
    }
    case TermKind::Proj1:
      return eval(st, m.child(0), env).first();
    case TermKind::Proj2:
      return eval(st, m.child(0), env).second();
    case TermKind::Pair:
      return Sem::pair(eval(st, m.child(0), env), eval(st, m.child(1), env));
    case TermKind::PChoice:
      return add(scale(eval(st, m.child(0), env), half()), scale(eval(st, m.child(1), env), half()));
    case TermKind::Ret:
      return Sem::dirac(eval(st, m.child(0), env));
    case TermKind::Do: {
      Variable x = m.variable();
      Term body = m.child(1);
      return vdagger([&](const Sem& v) { return eval(st, body, env.bind(x, v)); }, eval(st, m.child(0), env));
    }
    case TermKind::NChoice:
      return meet(eval(st, m.child(0), env), eval(st, m.child(1), env), st->type_of(m));
    case TermKind::Produce:
      return Sem::fset({eval(st, m.child(0), env)});
    case TermKind::To: {
      Variable x = m.variable();
      Term body = m.child(1);
      Sem q = eval(st, m.child(0), env);
      return qstar([&](const Sem& v) { return eval(st, body, env.bind(x, v)); }, q, st->type_of(m));
    }
    case TermKind::Pifz: {
      Sem n = eval(st, m.child(0), env);
      const auto& value = n.int_value();
      if (!value) return meet(eval(st, m.child(1), env), eval(st, m.child(2), env), st->type_of(m));
      return eval(st, m.child(*value == 0 ? 1 : 2), env);
    }
    case TermKind::Obs: {
      Sem q = eval(st, m.child(0), env);
      if (q.kind() == SemKind::FBot) return Sem::unit(false);
      return Sem::unit(hstar(q) > m.bound());
    }
  }
  throw std::logic_error("unknown term");
}

}  // namespace

EvalResult evaluate(const Term& m, const Env& env, const EvalConfig& config) {
  auto st = std::make_shared<State>();
  st->config = config;
  Sem v = eval(st, m, env);
  return EvalResult{v, st->exact};
}

}  // namespace cbpv::densem
