#include "devmodal/forcing.hpp"

#include "devmodal/checker.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace devmodal::forcing {

using structures::Element;
using structures::FiniteStructure;
using structures::Tuple;

HFSet::HFSet(std::vector<HFSet> children) : kids_(std::move(children)) {
  std::sort(kids_.begin(), kids_.end());
  kids_.erase(std::unique(kids_.begin(), kids_.end()), kids_.end());
}

int HFSet::rank() const {
  int r = 0;
  for (const HFSet& k : kids_) r = std::max(r, 1 + k.rank());
  return r;
}

int HFSet::cmp(const HFSet& a, const HFSet& b) {
  std::size_t n = std::min(a.kids_.size(), b.kids_.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = cmp(a.kids_[i], b.kids_[i]);
    if (c != 0) return c;
  }
  if (a.kids_.size() != b.kids_.size()) return a.kids_.size() < b.kids_.size() ? -1 : 1;
  return 0;
}

std::string HFSet::to_text() const {
  std::string out = "{";
  for (std::size_t i = 0; i < kids_.size(); ++i) {
    if (i) out += ",";
    out += kids_[i].to_text();
  }
  return out + "}";
}

bool Poset::contains(const std::string& e) const {
  return std::find(elems.begin(), elems.end(), e) != elems.end();
}

bool Poset::well_formed(std::string* why) const {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (!contains(bottom)) return fail("bottom '" + bottom + "' not an element");
  for (const auto& [a, b] : le)
    if (!contains(a) || !contains(b)) return fail("edge outside the element set");
  for (const std::string& a : elems)
    for (const std::string& b : elems) {
      if (a != b && leq(a, b) && leq(b, a)) return fail("not antisymmetric");
      for (const std::string& c : elems)
        if (leq(a, b) && leq(b, c) && !leq(a, c)) return fail("not transitive");
    }
  for (const std::string& a : elems)
    if (!leq(bottom, a)) return fail("bottom not below '" + a + "'");
  return true;
}

Poset parse_poset(const std::string& text) {
  Poset p;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto posh = line.find('#');
    if (posh != std::string::npos) line = line.substr(0, posh);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "elem") {
      std::string e;
      while (ls >> e) {
        if (p.contains(e)) throw ParseError("duplicate element '" + e + "'", 0);
        p.elems.push_back(e);
      }
    } else if (kw == "le") {
      std::string a, b;
      ls >> a >> b;
      p.le.insert({a, b});
    } else if (kw == "bottom") {
      ls >> p.bottom;
    } else {
      throw ParseError("unknown directive '" + kw + "' in poset file", 0);
    }
  }
  std::string why;
  if (!p.well_formed(&why)) throw FrameInvalidError("poset: " + why);
  return p;
}

std::vector<Poset> enumerate_posets(std::size_t n) {
  if (n == 0 || n > 5) throw BoundsTooLargeError("poset enumeration supports 1..5");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));

  std::vector<Poset> out;
  std::size_t pairs = n * (n - 1);
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b) idx.emplace_back(a, b);

  for (std::size_t mask = 0; mask < (std::size_t{1} << pairs); ++mask) {
    // strict-order candidate as a bit matrix
    std::vector<std::vector<bool>> lt(n, std::vector<bool>(n, false));
    for (std::size_t k = 0; k < pairs; ++k)
      if (mask & (std::size_t{1} << k)) lt[idx[k].first][idx[k].second] = true;
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a)
      for (std::size_t b = 0; b < n && ok; ++b) {
        if (lt[a][b] && lt[b][a]) ok = false;
        if (!ok) break;
        for (std::size_t c = 0; c < n; ++c)
          if (lt[a][b] && lt[b][c] && !lt[a][c]) {
            ok = false;
            break;
          }
      }
    if (!ok) continue;
    // needs a global bottom
    int bottom = -1;
    for (std::size_t a = 0; a < n && bottom < 0; ++a) {
      bool below_all = true;
      for (std::size_t b = 0; b < n; ++b)
        if (a != b && !lt[a][b]) below_all = false;
      if (below_all) bottom = static_cast<int>(a);
    }
    if (bottom < 0) continue;
    Poset p;
    p.elems = labels;
    p.bottom = labels[static_cast<std::size_t>(bottom)];
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (lt[a][b]) p.le.insert({labels[a], labels[b]});
    out.push_back(std::move(p));
  }
  return out;
}

PName::PName(std::vector<std::pair<PName, std::string>> pairs)
    : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end(),
            [](const std::pair<PName, std::string>& a,
               const std::pair<PName, std::string>& b) {
              int c = cmp(a.first, b.first);
              if (c != 0) return c < 0;
              return a.second < b.second;
            });
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end(),
                           [](const std::pair<PName, std::string>& a,
                              const std::pair<PName, std::string>& b) {
                             return cmp(a.first, b.first) == 0 && a.second == b.second;
                           }),
               pairs_.end());
}

int PName::rank() const {
  int r = 0;
  for (const auto& [k, _] : pairs_) r = std::max(r, 1 + k.rank());
  return r;
}

int PName::cmp(const PName& a, const PName& b) {
  std::size_t n = std::min(a.pairs_.size(), b.pairs_.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = cmp(a.pairs_[i].first, b.pairs_[i].first);
    if (c != 0) return c;
    if (a.pairs_[i].second != b.pairs_[i].second)
      return a.pairs_[i].second < b.pairs_[i].second ? -1 : 1;
  }
  if (a.pairs_.size() != b.pairs_.size())
    return a.pairs_.size() < b.pairs_.size() ? -1 : 1;
  return 0;
}

std::string PName::to_text() const {
  std::string out = "{";
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (i) out += ",";
    out += "(" + pairs_[i].first.to_text() + "," + pairs_[i].second + ")";
  }
  return out + "}";
}

namespace {

PName parse_pname_rec(const std::string& s, std::size_t& pos, const Poset& p) {
  auto skip_ws = [&] {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  };
  skip_ws();
  if (pos >= s.size() || s[pos] != '{') throw ParseError("expected '{'", pos);
  ++pos;
  std::vector<std::pair<PName, std::string>> pairs;
  skip_ws();
  while (pos < s.size() && s[pos] != '}') {
    skip_ws();
    if (s[pos] != '(') throw ParseError("expected '(name, cond)'", pos);
    ++pos;
    PName inner = parse_pname_rec(s, pos, p);
    skip_ws();
    if (pos >= s.size() || s[pos] != ',') throw ParseError("expected ','", pos);
    ++pos;
    skip_ws();
    std::string cond;
    while (pos < s.size() && s[pos] != ')' &&
           !std::isspace(static_cast<unsigned char>(s[pos])))
      cond += s[pos++];
    skip_ws();
    if (pos >= s.size() || s[pos] != ')') throw ParseError("expected ')'", pos);
    ++pos;
    if (!p.contains(cond))
      throw ParseError("condition '" + cond + "' is not a poset element", pos);
    pairs.emplace_back(std::move(inner), cond);
    skip_ws();
    if (pos < s.size() && s[pos] == ',') {
      ++pos;
      skip_ws();
    }
  }
  if (pos >= s.size()) throw ParseError("expected '}'", pos);
  ++pos;
  return PName(std::move(pairs));
}

}  // namespace

PName parse_pname(const std::string& text, const Poset& p) {
  std::size_t pos = 0;
  PName out = parse_pname_rec(text, pos, p);
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos != text.size()) throw ParseError("trailing input in name literal", pos);
  return out;
}

bool is_ideal(const Poset& p, const Ideal& i) {
  for (const std::string& a : i) {
    if (!p.contains(a)) return false;
    for (const std::string& b : p.elems)
      if (p.leq(b, a) && !i.count(b)) return false;  // down-set
  }
  for (const std::string& a : i)
    for (const std::string& b : i) {
      bool joined = false;
      for (const std::string& c : i)
        if (p.leq(a, c) && p.leq(b, c)) joined = true;
      if (!joined) return false;  // directed within the ideal
    }
  return true;
}

bool is_upward_dense(const Poset& p, const std::set<std::string>& d) {
  for (const std::string& a : p.elems) {
    bool hit = false;
    for (const std::string& x : d)
      if (p.leq(a, x)) hit = true;
    if (!hit) return false;
  }
  return true;
}

bool is_generic_ideal(const Poset& p, const Ideal& i) {
  if (!is_ideal(p, i)) return false;
  if (p.elems.size() > 12)
    throw BoundsTooLargeError("generic-ideal check enumerates subsets of up to 12 elements");
  std::size_t n = p.elems.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::set<std::string> d;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::size_t{1} << k)) d.insert(p.elems[k]);
    if (!is_upward_dense(p, d)) continue;
    bool meets = false;
    for (const std::string& x : d)
      if (i.count(x)) meets = true;
    if (!meets) return false;
  }
  return true;
}

std::vector<Ideal> all_ideals(const Poset& p, bool include_empty) {
  std::size_t n = p.elems.size();
  if (n > 12) throw BoundsTooLargeError("ideal enumeration capped at 12 elements");
  std::vector<Ideal> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Ideal i;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::size_t{1} << k)) i.insert(p.elems[k]);
    if (i.empty() && !include_empty) continue;
    if (is_ideal(p, i)) out.push_back(std::move(i));
  }
  return out;
}

bool contains_maximal_element(const Poset& p, const Ideal& i) {
  for (const std::string& a : i) {
    bool maximal = true;
    for (const std::string& b : p.elems)
      if (b != a && p.leq(a, b)) maximal = false;
    if (maximal) return true;
  }
  return false;
}

std::vector<PName> gen_pnames(const Poset& p, int rank_bound, int width_bound,
                              std::size_t cap) {
  if (rank_bound < 0 || width_bound < 0) return {};
  std::vector<PName> current{PName()};
  for (int r = 1; r <= rank_bound; ++r) {
    // all pairs over the previous layer
    std::vector<std::pair<PName, std::string>> candidates;
    for (const PName& nm : current)
      for (const std::string& q : p.elems) candidates.emplace_back(nm, q);
    std::set<PName> next(current.begin(), current.end());
    // subsets of the candidate pairs of size <= width_bound
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
      if (next.size() > cap)
        throw BoundsTooLargeError("name enumeration exceeded " + std::to_string(cap));
      if (!pick.empty()) {
        std::vector<std::pair<PName, std::string>> pairs;
        for (std::size_t k : pick) pairs.push_back(candidates[k]);
        next.insert(PName(std::move(pairs)));
      }
      if (pick.size() == static_cast<std::size_t>(width_bound)) return;
      for (std::size_t k = start; k < candidates.size(); ++k) {
        pick.push_back(k);
        rec(k + 1);
        pick.pop_back();
      }
    };
    rec(0);
    current.assign(next.begin(), next.end());
  }
  std::sort(current.begin(), current.end());
  return current;
}

HFSet val(const PName& tau, const Ideal& i) {
  std::vector<HFSet> kids;
  for (const auto& [sigma, q] : tau.pairs())
    if (i.count(q)) kids.push_back(val(sigma, i));
  return HFSet(std::move(kids));
}

bool in_star(const PName& sigma, const PName& tau, const Poset& p,
             const std::string& s) {
  for (const auto& [x, q] : tau.pairs())
    if (x == sigma && p.leq(q, s)) return true;
  return false;
}

bool in_tilde(const PName& sigma, const PName& tau, const Ideal& i) {
  for (const auto& [x, q] : tau.pairs())
    if (x == sigma && i.count(q)) return true;
  return false;
}

model::DevelopmentModel forcing_dev_model(const Poset& p, const Ideal& i,
                                          const std::vector<PName>& names) {
  if (i.empty() || !is_ideal(p, i))
    throw NotAnIdealError("states must form a non-empty ideal on the poset");

  auto sig = std::make_shared<const logic::Signature>(
      std::vector<logic::Sort>{logic::kStat},
      std::vector<logic::RelationDecl>{
          {"In", {logic::kStat, logic::kStat}, /*dynamic=*/true, false}});

  std::vector<Element> dom;
  for (const PName& nm : names) dom.push_back(nm.to_text());
  std::sort(dom.begin(), dom.end());

  model::Frame fr;
  std::map<model::StateId, FiniteStructure> assign;
  for (const std::string& s : i) fr.states.push_back(s);
  for (const std::string& s : i)
    for (const std::string& t : i)
      if (s != t && p.leq(s, t)) fr.order.insert({s, t});

  for (const std::string& s : i) {
    std::set<Tuple> in_rel;
    for (const PName& tau : names)
      for (const auto& [sigma, q] : tau.pairs())
        if (p.leq(q, s)) in_rel.insert({sigma.to_text(), tau.to_text()});
    // pairs may reference names outside the universe; keep only those inside
    std::set<Tuple> kept;
    for (const Tuple& t : in_rel)
      if (std::binary_search(dom.begin(), dom.end(), t[0])) kept.insert(t);
    assign.emplace(s, FiniteStructure(sig, {{logic::kStat, dom}},
                                      {{"In", std::move(kept)}}));
  }
  return model::DevelopmentModel(std::move(fr), std::move(assign));
}

TeleMembershipResult tele_membership(const model::DevelopmentModel& m, const Poset& p,
                                     const Ideal& i, const PName& sigma,
                                     const PName& tau) {
  TeleMembershipResult r;
  auto atom = logic::Formula::atom("In", {logic::Var{"x", logic::kStat},
                                          logic::Var{"y", logic::kStat}});
  structures::Assignment asg{{"x", sigma.to_text()}, {"y", tau.to_text()}};
  r.tele = check::satisfies_globally(m, logic::Formula::dia(logic::Formula::box(atom)),
                                     asg);
  r.eventual = check::satisfies_globally(m, logic::Formula::dia(atom), asg);
  r.pairwise = in_tilde(sigma, tau, i);
  (void)p;
  r.agree = (r.tele == r.eventual) && (r.eventual == r.pairwise);
  return r;
}

std::map<PName, HFSet> mostowski(
    const std::vector<PName>& names,
    const std::function<std::vector<PName>(const PName&)>& predecessors) {
  std::map<PName, HFSet> out;
  std::map<PName, int> state;  // 0 fresh, 1 in progress, 2 done
  std::function<const HFSet&(const PName&)> go = [&](const PName& tau) -> const HFSet& {
    auto it = out.find(tau);
    if (it != out.end()) return it->second;
    if (state[tau] == 1)
      throw NotWellFoundedError("membership cycle through " + tau.to_text());
    state[tau] = 1;
    std::vector<HFSet> kids;
    for (const PName& sigma : predecessors(tau)) kids.push_back(go(sigma));
    state[tau] = 2;
    return out.emplace(tau, HFSet(std::move(kids))).first->second;
  };
  for (const PName& nm : names) go(nm);
  return out;
}

CollapseCheck check_collapse(const Poset& p, const Ideal& i,
                             const std::vector<PName>& names) {
  (void)p;
  CollapseCheck out;
  std::map<PName, HFSet> mos = mostowski(names, [&](const PName& t) {
    std::vector<PName> preds;
    for (const auto& [sigma, q] : t.pairs())
      if (i.count(q) &&
          std::find(preds.begin(), preds.end(), sigma) == preds.end())
        preds.push_back(sigma);
    return preds;
  });
  std::set<HFSet> image_mos, image_val;
  for (const PName& nm : names) {
    HFSet v = val(nm, i);
    ++out.instances;
    image_mos.insert(mos.at(nm));
    image_val.insert(v);
    if (!(mos.at(nm) == v)) {
      out.pointwise = false;
      if (!out.first_mismatch)
        out.first_mismatch = nm.to_text() + ": mos=" + mos.at(nm).to_text() +
                             " val=" + v.to_text();
    }
  }
  out.image_equal = image_mos == image_val;
  return out;
}

PName d_tau_at(const PName& tau, const Poset& p, const std::string& s) {
  std::vector<std::pair<PName, std::string>> pairs;
  for (const auto& [sigma, q] : tau.pairs())
    if (p.leq(q, s)) pairs.emplace_back(sigma, p.bottom);
  return PName(std::move(pairs));
}

}  // namespace devmodal::forcing
