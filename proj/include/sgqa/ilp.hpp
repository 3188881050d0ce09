#pragma once

// 0/1 integer linear program representation. Variables carry enough typed
// information (kind + endpoint ids) for the support-graph extractor to map
// an optimal assignment back onto question/table elements; the solver side
// only ever sees names, coefficients and constraints.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace sgqa {

struct IlpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class VarKind {
  CellCell,
  CellQCons,
  HeaderQCons,
  CellOption,
  HeaderOption,
  ColumnOption,
  TableOption,
  ColumnColumnRelation,  // per annotated column pair: no-valid-match penalty
  ActiveTable,
  ActiveRow,
  ActiveColumn,
  ActiveHeader,
  ActiveCell,
  ActiveQCons,
  ActiveOption,
  AuxWhichActive,
  AuxWhichAligned,
  AuxCellProximity,
  RelationMatchQuad,
  Generic,  // deserialized / hand-built solver inputs
};

inline bool is_alignment_kind(VarKind k) {
  switch (k) {
    case VarKind::CellCell:
    case VarKind::CellQCons:
    case VarKind::HeaderQCons:
    case VarKind::CellOption:
    case VarKind::HeaderOption:
      return true;
    default:
      return false;
  }
}

struct IlpVariable {
  std::string name;
  VarKind kind = VarKind::Generic;
  double coeff = 0.0;  // objective coefficient
  double score = 0.0;  // alignment score w(e) for pairwise kinds

  // endpoint ids; unused fields stay at -1
  int table_a = -1, row_a = -1, col_a = -1;
  int table_b = -1, row_b = -1, col_b = -1;
  int qpos_a = -1, qpos_b = -1;
  int option = -1;
  int relation = -1;  // relation index within table_a
};

enum class Sense { LE, GE, EQ };

inline std::string sense_str(Sense s) {
  switch (s) {
    case Sense::LE: return "<=";
    case Sense::GE: return ">=";
    default: return "=";
  }
}

struct LinearConstraint {
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  Sense sense = Sense::LE;
  double rhs = 0.0;
  std::string tag;
};

class IlpProblem {
 public:
  int add_variable(IlpVariable v) {
    if (index_.count(v.name))
      throw IlpError("duplicate variable name '" + v.name + "'");
    const int idx = static_cast<int>(vars_.size());
    index_[v.name] = idx;
    vars_.push_back(std::move(v));
    return idx;
  }

  int add_variable(const std::string& name, double coeff,
                   VarKind kind = VarKind::Generic) {
    IlpVariable v;
    v.name = name;
    v.coeff = coeff;
    v.kind = kind;
    return add_variable(std::move(v));
  }

  void add_constraint(LinearConstraint c) {
    if (c.terms.empty())
      throw IlpError("constraint '" + c.tag + "' has no terms");
    for (const auto& [idx, coeff] : c.terms) {
      (void)coeff;
      if (idx < 0 || idx >= static_cast<int>(vars_.size()))
        throw IlpError("constraint '" + c.tag +
                       "' references an undeclared variable");
    }
    constraints_.push_back(std::move(c));
  }

  void add_constraint(const std::vector<std::pair<std::string, double>>& terms,
                      Sense sense, double rhs, const std::string& tag) {
    LinearConstraint c;
    for (const auto& [name, coeff] : terms)
      c.terms.emplace_back(require(name), coeff);
    c.sense = sense;
    c.rhs = rhs;
    c.tag = tag;
    add_constraint(std::move(c));
  }

  int find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  int require(const std::string& name) const {
    const int idx = find(name);
    if (idx < 0) throw IlpError("unknown variable '" + name + "'");
    return idx;
  }

  const std::vector<IlpVariable>& variables() const { return vars_; }
  const std::vector<LinearConstraint>& constraints() const {
    return constraints_;
  }
  const IlpVariable& variable(int idx) const { return vars_.at(idx); }
  int variable_count() const { return static_cast<int>(vars_.size()); }
  int constraint_count() const { return static_cast<int>(constraints_.size()); }

  double objective_of(const std::vector<double>& x) const {
    double obj = 0.0;
    for (size_t j = 0; j < vars_.size(); ++j) obj += vars_[j].coeff * x[j];
    return obj;
  }

  static double constraint_value(const LinearConstraint& c,
                                 const std::vector<double>& x) {
    double lhs = 0.0;
    for (const auto& [idx, coeff] : c.terms) lhs += coeff * x[idx];
    return lhs;
  }

  static bool satisfied(const LinearConstraint& c, const std::vector<double>& x,
                        double tol) {
    const double lhs = constraint_value(c, x);
    switch (c.sense) {
      case Sense::LE: return lhs <= c.rhs + tol;
      case Sense::GE: return lhs >= c.rhs - tol;
      default: return std::abs(lhs - c.rhs) <= tol;
    }
  }

  bool feasible(const std::vector<double>& x, double tol = 1e-6) const {
    for (const auto& c : constraints_)
      if (!satisfied(c, x, tol)) return false;
    return true;
  }

  std::vector<std::string> violations(const std::vector<double>& x,
                                      double tol = 1e-6) const {
    std::vector<std::string> out;
    for (const auto& c : constraints_)
      if (!satisfied(c, x, tol)) out.push_back(c.tag);
    return out;
  }

  // Keep only variables accepted by the predicate; drops every constraint
  // that mentions a removed variable if drop_touching is set, otherwise
  // removing a referenced variable is an error.
  template <typename Pred>
  IlpProblem filtered(Pred keep_var, bool drop_touching = true) const {
    IlpProblem out;
    std::vector<int> remap(vars_.size(), -1);
    for (size_t j = 0; j < vars_.size(); ++j) {
      if (keep_var(vars_[j]))
        remap[j] = out.add_variable(vars_[j]);
    }
    for (const auto& c : constraints_) {
      bool touched_removed = false;
      LinearConstraint nc;
      nc.sense = c.sense;
      nc.rhs = c.rhs;
      nc.tag = c.tag;
      for (const auto& [idx, coeff] : c.terms) {
        if (remap[idx] < 0) {
          touched_removed = true;
          break;
        }
        nc.terms.emplace_back(remap[idx], coeff);
      }
      if (touched_removed) {
        if (!drop_touching)
          throw IlpError("constraint '" + c.tag +
                         "' references a removed variable");
        continue;
      }
      out.add_constraint(std::move(nc));
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["vars"] = nlohmann::json::array();
    for (const auto& v : vars_)
      j["vars"].push_back({{"name", v.name}, {"coeff", v.coeff}});
    j["cons"] = nlohmann::json::array();
    for (const auto& c : constraints_) {
      nlohmann::json jc;
      jc["terms"] = nlohmann::json::array();
      for (const auto& [idx, coeff] : c.terms)
        jc["terms"].push_back({vars_[idx].name, coeff});
      jc["sense"] = sense_str(c.sense);
      jc["rhs"] = c.rhs;
      jc["tag"] = c.tag;
      j["cons"].push_back(jc);
    }
    return j;
  }

  static IlpProblem from_json(const nlohmann::json& j) {
    IlpProblem p;
    for (const auto& jv : j.at("vars"))
      p.add_variable(jv.at("name").get<std::string>(),
                     jv.at("coeff").get<double>());
    for (const auto& jc : j.at("cons")) {
      std::vector<std::pair<std::string, double>> terms;
      for (const auto& jt : jc.at("terms"))
        terms.emplace_back(jt.at(0).get<std::string>(),
                           jt.at(1).get<double>());
      const std::string s = jc.at("sense").get<std::string>();
      Sense sense = s == "<=" ? Sense::LE : s == ">=" ? Sense::GE : Sense::EQ;
      p.add_constraint(terms, sense, jc.at("rhs").get<double>(),
                       jc.value("tag", std::string{}));
    }
    return p;
  }

 private:
  std::vector<IlpVariable> vars_;
  std::vector<LinearConstraint> constraints_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace sgqa
