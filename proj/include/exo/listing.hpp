#pragma once

// Plain-text listing format for process models.
//
// EndogenousProcess-PickJugFromTable:
//     Parameters: [?robot:robot, ?jug:jug]
//     Conditions at start: [HandEmpty(?robot:robot), OnTable(?jug:jug)]
//     Conditions overall: []
//     Conditions at end: []
//     Add Effects: [Holding(?robot:robot, ?jug:jug)]
//     Delete Effects: [HandEmpty(?robot:robot), OnTable(?jug:jug)]
//     Ignore Effects: []
//     Log Strength: 1.0000
//     Delay Distribution: DiscreteGaussianDelay(3.0000, 0.1000)
//     Option Spec: PickJug(?robot:robot, ?jug:jug)
//
// Exogenous blocks omit the Ignore Effects and Option Spec lines. Parameters
// keep declaration order; atom lists and ignore lists print sorted by their
// rendered string. Some files end specific Option Spec lines with a trailing
// comma; the parser records that per block so re-printing is byte-stable.

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "exo/process.hpp"

namespace exo {

struct ParsedListing {
  ProcessSchema schema;
  bool trailing_comma = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// split "A(x, y), B(z)" at depth-0 commas
inline std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') depth++;
    if (c == ')') depth--;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  std::string last = trim(cur);
  if (!last.empty()) out.push_back(last);
  return out;
}

inline std::string expect_field(const std::string& line,
                                const std::string& field) {
  std::string prefix = "    " + field + ": ";
  if (line.rfind(prefix, 0) != 0)
    throw std::runtime_error("listing: expected '" + field + "' in: " + line);
  return line.substr(prefix.size());
}

inline std::string strip_brackets(const std::string& s) {
  std::string t = trim(s);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    throw std::runtime_error("listing: expected [...] got: " + s);
  return t.substr(1, t.size() - 2);
}

// "?robot:robot" -> (name "?robot", type "robot")
inline std::pair<std::string, std::string> parse_var(const std::string& s) {
  size_t c = s.find(':');
  if (s.empty() || s[0] != '?' || c == std::string::npos)
    throw std::runtime_error("listing: bad variable: " + s);
  return {s.substr(0, c), s.substr(c + 1)};
}

// intern a predicate, upgrading an empty signature seen via Ignore Effects
inline PredId intern_pred(Symbols& sym, const std::string& name,
                          const std::vector<TypeId>& types, bool known_arity) {
  auto it = sym.pred_by_name.find(name);
  if (it == sym.pred_by_name.end())
    return sym.add_pred({name, known_arity ? types : std::vector<TypeId>{}, ""});
  PredId id = it->second;
  if (known_arity) {
    Predicate& p = sym.preds[id];
    if (p.param_types.empty() && !types.empty()) p.param_types = types;
    else if (!p.param_types.empty() && p.param_types != types)
      throw std::runtime_error("listing: predicate arity mismatch: " + name);
  }
  return id;
}

}  // namespace detail

inline std::vector<ParsedListing> parse_listings(const std::string& text,
                                                 Symbols& sym) {
  using namespace detail;
  std::vector<std::string> lines;
  {
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  std::vector<ParsedListing> out;
  size_t i = 0;
  while (i < lines.size()) {
    if (trim(lines[i]).empty()) {
      i++;
      continue;
    }
    ParsedListing pl;
    ProcessSchema& ps = pl.schema;
    const std::string& head = lines[i];
    const std::string endo_tag = "EndogenousProcess-";
    const std::string exo_tag = "ExogenousProcess-";
    if (head.rfind(endo_tag, 0) == 0) {
      ps.endogenous = true;
      ps.name = head.substr(endo_tag.size());
    } else if (head.rfind(exo_tag, 0) == 0) {
      ps.endogenous = false;
      ps.name = head.substr(exo_tag.size());
    } else {
      throw std::runtime_error("listing: bad header: " + head);
    }
    if (ps.name.empty() || ps.name.back() != ':')
      throw std::runtime_error("listing: header missing colon: " + head);
    ps.name.pop_back();
    i++;

    auto need_line = [&]() -> const std::string& {
      if (i >= lines.size())
        throw std::runtime_error("listing: truncated block: " + ps.name);
      return lines[i++];
    };

    // Parameters
    for (const std::string& v :
         split_top(strip_brackets(expect_field(need_line(), "Parameters")))) {
      auto [vn, tn] = parse_var(v);
      ps.params.push_back({vn, sym.add_type(tn)});
    }
    auto param_index = [&](const std::string& vname) {
      for (int k = 0; k < (int)ps.params.size(); ++k)
        if (ps.params[k].name == vname) return k;
      throw std::runtime_error("listing: undeclared variable " + vname +
                               " in " + ps.name);
    };
    auto parse_atoms = [&](const std::string& body,
                           std::vector<LiftedAtom>& dst) {
      for (const std::string& a : split_top(body)) {
        size_t open = a.find('(');
        if (open == std::string::npos || a.back() != ')')
          throw std::runtime_error("listing: bad atom: " + a);
        std::string pname = a.substr(0, open);
        LiftedAtom la;
        std::vector<TypeId> types;
        for (const std::string& v :
             split_top(a.substr(open + 1, a.size() - open - 2))) {
          auto [vn, tn] = parse_var(v);
          int idx = param_index(vn);
          if (sym.types[ps.params[idx].type].name != tn)
            throw std::runtime_error("listing: variable type mismatch: " + v);
          la.args.push_back(idx);
          types.push_back(ps.params[idx].type);
        }
        la.pred = intern_pred(sym, pname, types, true);
        dst.push_back(la);
      }
    };
    parse_atoms(strip_brackets(expect_field(need_line(), "Conditions at start")),
                ps.cond_start);
    parse_atoms(strip_brackets(expect_field(need_line(), "Conditions overall")),
                ps.cond_overall);
    parse_atoms(strip_brackets(expect_field(need_line(), "Conditions at end")),
                ps.cond_end);
    parse_atoms(strip_brackets(expect_field(need_line(), "Add Effects")),
                ps.add_eff);
    parse_atoms(strip_brackets(expect_field(need_line(), "Delete Effects")),
                ps.del_eff);
    if (ps.endogenous) {
      for (const std::string& n :
           split_top(strip_brackets(expect_field(need_line(), "Ignore Effects"))))
        ps.ignore_effects.push_back(intern_pred(sym, n, {}, false));
    }
    ps.log_strength =
        std::stod(expect_field(need_line(), "Log Strength"));
    {
      std::string d = expect_field(need_line(), "Delay Distribution");
      size_t open = d.find('(');
      if (open == std::string::npos || d.back() != ')')
        throw std::runtime_error("listing: bad delay: " + d);
      std::string kind = d.substr(0, open);
      auto args = split_top(d.substr(open + 1, d.size() - open - 2));
      if (kind == "ConstantDelay" && args.size() == 1) {
        ps.delay = DelayDistribution::constant(std::stod(args[0]));
      } else if (kind == "DiscreteGaussianDelay" && args.size() == 2) {
        ps.delay =
            DelayDistribution::gaussian(std::stod(args[0]), std::stod(args[1]));
      } else {
        throw std::runtime_error("listing: bad delay: " + d);
      }
    }
    if (ps.endogenous) {
      std::string o = expect_field(need_line(), "Option Spec");
      if (!o.empty() && o.back() == ',') {
        pl.trailing_comma = true;
        o.pop_back();
      }
      o = trim(o);
      size_t open = o.find('(');
      if (open == std::string::npos || o.back() != ')')
        throw std::runtime_error("listing: bad option spec: " + o);
      ps.option.skill = o.substr(0, open);
      for (const std::string& v :
           split_top(o.substr(open + 1, o.size() - open - 2))) {
        auto [vn, tn] = parse_var(v);
        int idx = param_index(vn);
        if (sym.types[ps.params[idx].type].name != tn)
          throw std::runtime_error("listing: option var type mismatch: " + v);
        ps.option.args.push_back(idx);
      }
    }
    out.push_back(std::move(pl));
  }
  return out;
}

namespace detail {

inline std::string fmt4(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::string lifted_atom_str(const Symbols& sym, const ProcessSchema& ps,
                                   const LiftedAtom& a) {
  std::string s = sym.preds[a.pred].name + "(";
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ", ";
    const Variable& v = ps.params[a.args[i]];
    s += v.name + ":" + sym.types[v.type].name;
  }
  s += ")";
  return s;
}

inline std::string atom_list_str(const Symbols& sym, const ProcessSchema& ps,
                                 const std::vector<LiftedAtom>& atoms) {
  std::vector<std::string> rendered;
  for (const LiftedAtom& a : atoms) rendered.push_back(lifted_atom_str(sym, ps, a));
  std::sort(rendered.begin(), rendered.end());
  std::string s = "[";
  for (size_t i = 0; i < rendered.size(); ++i) {
    if (i) s += ", ";
    s += rendered[i];
  }
  s += "]";
  return s;
}

}  // namespace detail

inline std::string print_listing(const Symbols& sym, const ProcessSchema& ps,
                                 bool trailing_comma = false) {
  using namespace detail;
  std::string s;
  s += (ps.endogenous ? "EndogenousProcess-" : "ExogenousProcess-") + ps.name +
       ":\n";
  s += "    Parameters: [";
  for (size_t i = 0; i < ps.params.size(); ++i) {
    if (i) s += ", ";
    s += ps.params[i].name + ":" + sym.types[ps.params[i].type].name;
  }
  s += "]\n";
  s += "    Conditions at start: " + atom_list_str(sym, ps, ps.cond_start) + "\n";
  s += "    Conditions overall: " + atom_list_str(sym, ps, ps.cond_overall) + "\n";
  s += "    Conditions at end: " + atom_list_str(sym, ps, ps.cond_end) + "\n";
  s += "    Add Effects: " + atom_list_str(sym, ps, ps.add_eff) + "\n";
  s += "    Delete Effects: " + atom_list_str(sym, ps, ps.del_eff) + "\n";
  if (ps.endogenous) {
    std::vector<std::string> names;
    for (PredId p : ps.ignore_effects) names.push_back(sym.preds[p].name);
    std::sort(names.begin(), names.end());
    s += "    Ignore Effects: [";
    for (size_t i = 0; i < names.size(); ++i) {
      if (i) s += ", ";
      s += names[i];
    }
    s += "]\n";
  }
  s += "    Log Strength: " + fmt4(ps.log_strength) + "\n";
  s += "    Delay Distribution: " + delay_str(ps.delay) + "\n";
  if (ps.endogenous) {
    s += "    Option Spec: " + ps.option.skill + "(";
    for (size_t i = 0; i < ps.option.args.size(); ++i) {
      if (i) s += ", ";
      const Variable& v = ps.params[ps.option.args[i]];
      s += v.name + ":" + sym.types[v.type].name;
    }
    s += ")";
    if (trailing_comma) s += ",";
    s += "\n";
  }
  return s;
}

enum class CommaStyle {
  kPreserve,   // use each block's parsed flag
  kGivenFile,  // comma after every endogenous block except the file's last block
  kNone,
};

inline std::string print_listing_file(const Symbols& sym,
                                      const std::vector<ParsedListing>& blocks,
                                      CommaStyle style = CommaStyle::kPreserve) {
  std::string s;
  for (size_t i = 0; i < blocks.size(); ++i) {
    bool comma = false;
    switch (style) {
      case CommaStyle::kPreserve: comma = blocks[i].trailing_comma; break;
      case CommaStyle::kGivenFile: comma = i + 1 < blocks.size(); break;
      case CommaStyle::kNone: comma = false; break;
    }
    if (i) s += "\n";
    s += print_listing(sym, blocks[i].schema, comma);
  }
  return s;
}

inline std::string print_model_listings(const Symbols& sym,
                                        const std::vector<ProcessSchema>& ss,
                                        CommaStyle style = CommaStyle::kNone) {
  std::vector<ParsedListing> blocks;
  for (const ProcessSchema& p : ss) blocks.push_back({p, false});
  return print_listing_file(sym, blocks, style);
}

}  // namespace exo
