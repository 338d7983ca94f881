#pragma once

// Symbolic core: types, objects, predicates, ground atoms, and bitset states.
// All names are interned into dense ids; a TaskUniverse fixes the ground atom
// numbering for one task so states can be stored as flat bitsets.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace exo {

using TypeId = int32_t;
using ObjectId = int32_t;
using PredId = int32_t;
using AtomId = int32_t;

struct ObjectType {
  std::string name;
};

struct Object {
  std::string name;
  TypeId type = -1;
};

// Feature vector for one object, keyed by feature name. Classifiers read
// only the features of their argument objects.
using Features = std::map<std::string, double>;

struct FeatureState {
  // object id -> features
  std::vector<Features> features;
};

struct Predicate {
  std::string name;
  std::vector<TypeId> param_types;
  // key into the environment's classifier registry; empty for predicates
  // whose truth is set directly (derived or latent bookkeeping).
  std::string classifier;
};

struct Symbols {
  std::vector<ObjectType> types;
  std::vector<Object> objects;
  std::vector<Predicate> preds;
  std::unordered_map<std::string, TypeId> type_by_name;
  std::unordered_map<std::string, ObjectId> object_by_name;
  std::unordered_map<std::string, PredId> pred_by_name;

  TypeId add_type(const std::string& name) {
    auto it = type_by_name.find(name);
    if (it != type_by_name.end()) return it->second;
    TypeId id = (TypeId)types.size();
    types.push_back({name});
    type_by_name[name] = id;
    return id;
  }
  ObjectId add_object(const std::string& name, TypeId type) {
    auto it = object_by_name.find(name);
    if (it != object_by_name.end()) {
      if (objects[it->second].type != type)
        throw std::runtime_error("object redeclared with different type: " + name);
      return it->second;
    }
    ObjectId id = (ObjectId)objects.size();
    objects.push_back({name, type});
    object_by_name[name] = id;
    return id;
  }
  PredId add_pred(Predicate p) {
    auto it = pred_by_name.find(p.name);
    if (it != pred_by_name.end()) return it->second;
    PredId id = (PredId)preds.size();
    pred_by_name[p.name] = id;
    preds.push_back(std::move(p));
    return id;
  }
  TypeId type_id(const std::string& name) const {
    auto it = type_by_name.find(name);
    if (it == type_by_name.end()) throw std::runtime_error("unknown type: " + name);
    return it->second;
  }
  ObjectId object_id(const std::string& name) const {
    auto it = object_by_name.find(name);
    if (it == object_by_name.end()) throw std::runtime_error("unknown object: " + name);
    return it->second;
  }
  PredId pred_id(const std::string& name) const {
    auto it = pred_by_name.find(name);
    if (it == pred_by_name.end()) throw std::runtime_error("unknown predicate: " + name);
    return it->second;
  }
  bool has_pred(const std::string& name) const {
    return pred_by_name.count(name) > 0;
  }
};

// Text manifest of type and predicate declarations, one per line:
//   type <name>
//   pred <Name> <param type>... [key=<classifier>]
// Blank lines and #-comments are skipped. Types must be declared before use.
// Returns the ids of the declared predicates in file order.
inline std::vector<PredId> load_manifest(Symbols& sym,
                                         const std::string& text) {
  std::vector<PredId> declared;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "type") {
      std::string name;
      if (!(ls >> name))
        throw std::runtime_error("manifest line " + std::to_string(lineno) +
                                 ": type needs a name");
      sym.add_type(name);
    } else if (kind == "pred") {
      Predicate p;
      if (!(ls >> p.name))
        throw std::runtime_error("manifest line " + std::to_string(lineno) +
                                 ": pred needs a name");
      std::string tok;
      while (ls >> tok) {
        if (tok.rfind("key=", 0) == 0)
          p.classifier = tok.substr(4);
        else
          p.param_types.push_back(sym.type_id(tok));
      }
      declared.push_back(sym.add_pred(std::move(p)));
    } else {
      throw std::runtime_error("manifest line " + std::to_string(lineno) +
                               ": unknown declaration '" + kind + "'");
    }
  }
  return declared;
}

inline std::string print_manifest(const Symbols& sym,
                                  const std::vector<PredId>& preds) {
  std::string out;
  std::vector<bool> need_type(sym.types.size(), false);
  for (PredId p : preds)
    for (TypeId t : sym.preds[p].param_types) need_type[t] = true;
  for (TypeId t = 0; t < (TypeId)sym.types.size(); ++t)
    if (need_type[t]) out += "type " + sym.types[t].name + "\n";
  for (PredId p : preds) {
    const Predicate& pred = sym.preds[p];
    out += "pred " + pred.name;
    for (TypeId t : pred.param_types) out += " " + sym.types[t].name;
    if (!pred.classifier.empty()) out += " key=" + pred.classifier;
    out += "\n";
  }
  return out;
}

struct GroundAtom {
  PredId pred = -1;
  std::vector<ObjectId> args;

  bool operator==(const GroundAtom& o) const {
    return pred == o.pred && args == o.args;
  }
  bool operator<(const GroundAtom& o) const {
    if (pred != o.pred) return pred < o.pred;
    return args < o.args;
  }
};

inline std::string atom_str(const Symbols& sym, const GroundAtom& a) {
  std::string s = sym.preds[a.pred].name + "(";
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ", ";
    s += sym.objects[a.args[i]].name;
  }
  s += ")";
  return s;
}

// Canonical order of ground atoms: lexicographic by (predicate name, argument
// names). Used for the dense AtomId numbering and all printed listings.
struct TaskUniverse {
  const Symbols* sym = nullptr;
  std::vector<GroundAtom> atoms;          // AtomId -> atom, in canonical order
  std::map<GroundAtom, AtomId> index;

  AtomId id_of(const GroundAtom& a) const {
    auto it = index.find(a);
    if (it == index.end()) throw std::runtime_error("atom outside universe");
    return it->second;
  }
  bool contains(const GroundAtom& a) const { return index.count(a) > 0; }
  int size() const { return (int)atoms.size(); }
};

// Enumerate every well-typed ground atom over the given predicates.
inline TaskUniverse atom_universe(const Symbols& sym,
                                  const std::vector<PredId>& preds) {
  // objects per type
  std::vector<std::vector<ObjectId>> by_type(sym.types.size());
  for (ObjectId o = 0; o < (ObjectId)sym.objects.size(); ++o)
    by_type[sym.objects[o].type].push_back(o);

  std::vector<std::pair<std::string, GroundAtom>> keyed;
  for (PredId p : preds) {
    const Predicate& pred = sym.preds[p];
    std::vector<GroundAtom> frontier{{p, {}}};
    for (TypeId t : pred.param_types) {
      std::vector<GroundAtom> next;
      for (const GroundAtom& g : frontier)
        for (ObjectId o : by_type[t]) {
          GroundAtom g2 = g;
          g2.args.push_back(o);
          next.push_back(std::move(g2));
        }
      frontier = std::move(next);
    }
    for (GroundAtom& g : frontier) {
      std::string key = pred.name;
      for (ObjectId o : g.args) key += "\x1f" + sym.objects[o].name;
      keyed.emplace_back(std::move(key), std::move(g));
    }
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  TaskUniverse u;
  u.sym = &sym;
  for (auto& [k, g] : keyed) {
    u.index[g] = (AtomId)u.atoms.size();
    u.atoms.push_back(std::move(g));
  }
  return u;
}

// Set of atoms as a bitset over a TaskUniverse.
struct AbstractState {
  std::vector<uint64_t> bits;

  AbstractState() = default;
  explicit AbstractState(int n) : bits((n + 63) / 64, 0) {}

  bool test(AtomId i) const { return (bits[i >> 6] >> (i & 63)) & 1; }
  void set(AtomId i) { bits[i >> 6] |= (uint64_t(1) << (i & 63)); }
  void reset(AtomId i) { bits[i >> 6] &= ~(uint64_t(1) << (i & 63)); }
  void assign(AtomId i, bool v) { v ? set(i) : reset(i); }

  bool operator==(const AbstractState& o) const { return bits == o.bits; }
  bool operator!=(const AbstractState& o) const { return bits != o.bits; }

  bool subset_of(const AbstractState& o) const {
    for (size_t i = 0; i < bits.size(); ++i)
      if (bits[i] & ~o.bits[i]) return false;
    return true;
  }
  int count() const {
    int n = 0;
    for (uint64_t w : bits) n += __builtin_popcountll(w);
    return n;
  }
  std::vector<AtomId> to_ids() const {
    std::vector<AtomId> out;
    for (size_t w = 0; w < bits.size(); ++w) {
      uint64_t x = bits[w];
      while (x) {
        int b = __builtin_ctzll(x);
        out.push_back((AtomId)(w * 64 + b));
        x &= x - 1;
      }
    }
    return out;
  }
  size_t hash() const {
    // FNV-1a over the words
    uint64_t h = 1469598103934665603ull;
    for (uint64_t w : bits) {
      h ^= w;
      h *= 1099511628211ull;
    }
    return (size_t)h;
  }
};

struct AbstractStateHash {
  size_t operator()(const AbstractState& s) const { return s.hash(); }
};

inline std::vector<std::string> state_atom_names(const TaskUniverse& u,
                                                 const AbstractState& s) {
  std::vector<std::string> out;
  for (AtomId i : s.to_ids()) out.push_back(atom_str(*u.sym, u.atoms[i]));
  return out;
}

}  // namespace exo
