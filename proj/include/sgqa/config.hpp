#pragma once

// All tunables in one place. Defaults are the model's published operating
// point; every field can be overridden through a flat key/value config file
// (lines of `key = value`, `#` comments).

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sgqa {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimum alignment scores below which no pairwise variable is created.
struct Thresholds {
  double min_cell_cell_alignment = 0.6;
  double min_cell_qcons_alignment = 0.1;
  double min_title_qcons_alignment = 0.1;
  double min_title_title_alignment = 0.0;
  double min_cell_qchoice_alignment = 0.2;
  double min_title_qchoice_alignment = 0.2;
  double min_cell_qchoice_cons_alignment = 0.4;
  double min_title_qchoice_cons_alignment = 0.4;
  double min_active_cell_aggr_alignment = 0.1;
  double min_active_title_aggr_alignment = 0.1;
};

struct ModelConstants {
  int max_tables_to_chain = 4;
  int qcons_coalign_max_dist = 4;
  int which_term_span = 2;
  double which_term_mul_boost = 1.0;  // stored for completeness; no printed use
  double min_alignment_which_term = 0.6;
  double table_usage_penalty = 3.0;
  double row_usage_penalty = 1.0;  // subsumed by the -1.0 active-row weight
  double inter_table_alignment_penalty = 0.1;
  int max_alignments_per_qcons = 2;
  int max_alignments_per_cell = 2;
  double relation_match_coeff = 0.2;
  double empty_relation_match_coeff = 0.0;
  double no_relation_match_coeff = -5.0;
  int max_rows_per_table = 4;
  int min_active_qcons = 1;
  int max_active_column_choice_alignments = 1;
  int max_active_choice_column_vars = 2;
  int max_active_table_choice_alignments = 4;
  int min_active_cells_per_row = 2;
};

struct ObjectiveWeights {
  // Cross-table cell pairs: either a fixed bonus or the alignment score,
  // minus the inter-table penalty. Both readings of the published weight
  // table are supported; the fixed bonus is the default.
  double cell_cell_bonus = 1.0;
  bool cell_cell_use_score = false;
  // Pairwise kinds below use the alignment score itself.
  double active_table = 1.0;  // effective weight is this minus the usage penalty
  double active_row = -1.0;
  double active_column = 1.0;
  double active_header = 0.3;
  double active_cell = 0.0;
  double active_qcons = 0.3;
  double aux_which = 1.5;
};

enum class AblationMode { None, NoMultirow, NoRelationMatch };

inline AblationMode parse_ablation(const std::string& s) {
  if (s == "none" || s.empty()) return AblationMode::None;
  if (s == "no_multirow") return AblationMode::NoMultirow;
  if (s == "no_relation_match") return AblationMode::NoRelationMatch;
  throw ConfigError("unknown ablation mode '" + s + "'");
}

inline std::string ablation_str(AblationMode m) {
  switch (m) {
    case AblationMode::NoMultirow: return "no_multirow";
    case AblationMode::NoRelationMatch: return "no_relation_match";
    default: return "none";
  }
}

struct PipelineConfig {
  Thresholds thresholds;
  ModelConstants constants;
  ObjectiveWeights weights;
  int k_tables = 7;
  int n_rows = 20;
  double tie_epsilon = 1e-6;
  double time_limit_seconds = 60.0;
  std::string scorer = "overlap";
  std::string stopwords_file;
  AblationMode ablation = AblationMode::None;
};

namespace detail {

using Setter = std::function<void(PipelineConfig&, const std::string&)>;

inline double to_double(const std::string& v) {
  size_t pos = 0;
  double d = std::stod(v, &pos);
  if (pos != v.size()) throw ConfigError("bad numeric value '" + v + "'");
  return d;
}

inline int to_int(const std::string& v) {
  size_t pos = 0;
  int i = std::stoi(v, &pos);
  if (pos != v.size()) throw ConfigError("bad integer value '" + v + "'");
  return i;
}

inline bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean value '" + v + "'");
}

inline const std::map<std::string, Setter>& config_setters() {
  static const std::map<std::string, Setter> setters = [] {
    std::map<std::string, Setter> m;
    auto dbl = [&m](const std::string& key, double Thresholds::*field) {
      m[key] = [field](PipelineConfig& c, const std::string& v) {
        c.thresholds.*field = to_double(v);
      };
    };
    dbl("min_cell_cell_alignment", &Thresholds::min_cell_cell_alignment);
    dbl("min_cell_qcons_alignment", &Thresholds::min_cell_qcons_alignment);
    dbl("min_title_qcons_alignment", &Thresholds::min_title_qcons_alignment);
    dbl("min_title_title_alignment", &Thresholds::min_title_title_alignment);
    dbl("min_cell_qchoice_alignment", &Thresholds::min_cell_qchoice_alignment);
    dbl("min_title_qchoice_alignment",
        &Thresholds::min_title_qchoice_alignment);
    dbl("min_cell_qchoice_cons_alignment",
        &Thresholds::min_cell_qchoice_cons_alignment);
    dbl("min_title_qchoice_cons_alignment",
        &Thresholds::min_title_qchoice_cons_alignment);
    dbl("min_active_cell_aggr_alignment",
        &Thresholds::min_active_cell_aggr_alignment);
    dbl("min_active_title_aggr_alignment",
        &Thresholds::min_active_title_aggr_alignment);

    auto ci = [&m](const std::string& key, int ModelConstants::*field) {
      m[key] = [field](PipelineConfig& c, const std::string& v) {
        c.constants.*field = to_int(v);
      };
    };
    auto cd = [&m](const std::string& key, double ModelConstants::*field) {
      m[key] = [field](PipelineConfig& c, const std::string& v) {
        c.constants.*field = to_double(v);
      };
    };
    ci("max_tables_to_chain", &ModelConstants::max_tables_to_chain);
    ci("qcons_coalign_max_dist", &ModelConstants::qcons_coalign_max_dist);
    ci("which_term_span", &ModelConstants::which_term_span);
    cd("which_term_mul_boost", &ModelConstants::which_term_mul_boost);
    cd("min_alignment_which_term", &ModelConstants::min_alignment_which_term);
    cd("table_usage_penalty", &ModelConstants::table_usage_penalty);
    cd("row_usage_penalty", &ModelConstants::row_usage_penalty);
    cd("inter_table_alignment_penalty",
       &ModelConstants::inter_table_alignment_penalty);
    ci("max_alignments_per_qcons", &ModelConstants::max_alignments_per_qcons);
    ci("max_alignments_per_cell", &ModelConstants::max_alignments_per_cell);
    cd("relation_match_coeff", &ModelConstants::relation_match_coeff);
    cd("empty_relation_match_coeff",
       &ModelConstants::empty_relation_match_coeff);
    cd("no_relation_match_coeff", &ModelConstants::no_relation_match_coeff);
    ci("max_rows_per_table", &ModelConstants::max_rows_per_table);
    ci("min_active_qcons", &ModelConstants::min_active_qcons);
    ci("max_active_column_choice_alignments",
       &ModelConstants::max_active_column_choice_alignments);
    ci("max_active_choice_column_vars",
       &ModelConstants::max_active_choice_column_vars);
    ci("max_active_table_choice_alignments",
       &ModelConstants::max_active_table_choice_alignments);
    ci("min_active_cells_per_row", &ModelConstants::min_active_cells_per_row);

    auto wd = [&m](const std::string& key, double ObjectiveWeights::*field) {
      m[key] = [field](PipelineConfig& c, const std::string& v) {
        c.weights.*field = to_double(v);
      };
    };
    wd("cell_cell_bonus", &ObjectiveWeights::cell_cell_bonus);
    m["cell_cell_use_score"] = [](PipelineConfig& c, const std::string& v) {
      c.weights.cell_cell_use_score = to_bool(v);
    };
    wd("active_table", &ObjectiveWeights::active_table);
    wd("active_row", &ObjectiveWeights::active_row);
    wd("active_column", &ObjectiveWeights::active_column);
    wd("active_header", &ObjectiveWeights::active_header);
    wd("active_cell", &ObjectiveWeights::active_cell);
    wd("active_qcons", &ObjectiveWeights::active_qcons);
    wd("aux_which", &ObjectiveWeights::aux_which);

    m["k_tables"] = [](PipelineConfig& c, const std::string& v) {
      c.k_tables = to_int(v);
    };
    m["n_rows"] = [](PipelineConfig& c, const std::string& v) {
      c.n_rows = to_int(v);
    };
    m["tie_epsilon"] = [](PipelineConfig& c, const std::string& v) {
      c.tie_epsilon = to_double(v);
    };
    m["time_limit_seconds"] = [](PipelineConfig& c, const std::string& v) {
      c.time_limit_seconds = to_double(v);
    };
    m["scorer"] = [](PipelineConfig& c, const std::string& v) {
      c.scorer = v;
    };
    m["stopwords_file"] = [](PipelineConfig& c, const std::string& v) {
      c.stopwords_file = v;
    };
    m["ablation"] = [](PipelineConfig& c, const std::string& v) {
      c.ablation = parse_ablation(v);
    };
    return m;
  }();
  return setters;
}

}  // namespace detail

inline void set_config_key(PipelineConfig& config, const std::string& key,
                           const std::string& value) {
  const auto& setters = detail::config_setters();
  auto it = setters.find(key);
  if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(config, value);
}

inline PipelineConfig load_config(const std::filesystem::path& file,
                                  PipelineConfig base = {}) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string key, eq, value;
    std::istringstream ls(line);
    if (!(ls >> key)) continue;
    ls >> eq;
    if (eq != "=") {
      // allow `key value` as well as `key = value`
      value = eq;
    } else if (!(ls >> value)) {
      throw ConfigError(file.string() + ":" + std::to_string(lineno) +
                        ": missing value for '" + key + "'");
    }
    std::string extra;
    if (ls >> extra)
      throw ConfigError(file.string() + ":" + std::to_string(lineno) +
                        ": trailing content after value");
    try {
      set_config_key(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return base;
}

}  // namespace sgqa
