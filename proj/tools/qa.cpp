// Command line front end: answer questions over a table corpus, evaluate
// datasets, dump support graphs, generate perturbed questions, and train or
// apply the solver-combination model.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgqa/config.hpp"
#include "sgqa/corpus_io.hpp"
#include "sgqa/ensemble.hpp"
#include "sgqa/perturb.hpp"
#include "sgqa/pipeline.hpp"
#include "sgqa/support_graph.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string corpus_dir;
  std::string questions_file;
  std::string config_file;
  std::string ablation;
  std::string stopwords_file;
};

sgqa::PipelineConfig make_config(const CommonOpts& opts) {
  sgqa::PipelineConfig config;
  if (!opts.config_file.empty())
    config = sgqa::load_config(opts.config_file, config);
  if (!opts.ablation.empty())
    config.ablation = sgqa::parse_ablation(opts.ablation);
  if (!opts.stopwords_file.empty()) config.stopwords_file = opts.stopwords_file;
  return config;
}

sgqa::TableCorpus load(const CommonOpts& opts,
                       const sgqa::PipelineConfig& config) {
  return sgqa::load_corpus(opts.corpus_dir, config.stopwords_file);
}

std::string tie_text(const sgqa::Question& q, const std::vector<int>& tie) {
  std::string out;
  for (size_t i = 0; i < tie.size(); ++i) {
    if (i) out += " | ";
    out += q.options[tie[i]].text;
  }
  return out;
}

std::vector<sgqa::SolverScores> load_score_files(const std::string& dir,
                                                 const std::string& qid,
                                                 int n_options) {
  std::vector<sgqa::SolverScores> out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::ifstream in(file);
    json j;
    in >> j;
    sgqa::SolverScores s;
    s.solver = j.value("solver", file.stem().string());
    const auto& scores = j.at("scores");
    if (!scores.contains(qid))
      throw std::runtime_error("score file " + file.string() +
                               " has no entry for question '" + qid + "'");
    s.scores = scores.at(qid).get<std::vector<double>>();
    if (static_cast<int>(s.scores.size()) != n_options)
      throw std::runtime_error("score file " + file.string() + " lists " +
                               std::to_string(s.scores.size()) +
                               " scores for '" + qid + "', expected " +
                               std::to_string(n_options));
    out.push_back(std::move(s));
  }
  if (out.empty())
    throw std::runtime_error("no .json score files found in " + dir);
  return out;
}

int cmd_answer(const CommonOpts& opts) {
  const auto config = make_config(opts);
  const auto corpus = load(opts, config);
  const auto questions =
      sgqa::load_questions(opts.questions_file, corpus.stopwords);
  for (const auto& q : questions) {
    const auto sel = sgqa::answer_question(q, corpus, config);
    if (sel.abstained()) {
      std::cout << q.id << ": abstain\n";
      continue;
    }
    std::cout << q.id << ": " << tie_text(q, sel.tie);
    std::cout << "  (objective " << sel.per_option_objective.at(sel.chosen());
    if (sel.tie.size() > 1) std::cout << ", " << sel.tie.size() << "-way tie";
    if (sel.timed_out) std::cout << ", timed out";
    std::cout << ")\n";
  }
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& report_file) {
  const auto config = make_config(opts);
  const auto corpus = load(opts, config);
  const auto questions =
      sgqa::load_questions(opts.questions_file, corpus.stopwords);
  const auto report = sgqa::evaluate(questions, corpus, config);
  for (const auto& rec : report.records)
    std::cout << rec.question_id << ": score " << rec.score << "\n";
  std::cout << "aggregate: " << report.aggregate_score << "\n";
  if (!report_file.empty()) {
    std::ofstream out(report_file);
    out << sgqa::report_to_json(report, questions).dump(2) << '\n';
    std::cout << "report written to " << report_file << "\n";
  }
  return 0;
}

int cmd_explain(const CommonOpts& opts, const std::string& out_file) {
  const auto config = make_config(opts);
  const auto corpus = load(opts, config);
  const auto questions =
      sgqa::load_questions(opts.questions_file, corpus.stopwords);
  json out = json::array();
  for (const auto& q : questions) {
    const auto sel = sgqa::answer_question(q, corpus, config);
    json jq;
    jq["id"] = q.id;
    jq["abstained"] = sel.abstained();
    if (!sel.abstained()) {
      jq["chosen"] = q.options[sel.chosen()].text;
      jq["tie"] = sel.tie;
      jq["support"] = sgqa::support_graph_to_json(*sel.support, q);
      // rebuild the problem for feature extraction context
      const auto scorer = sgqa::make_scorer(config.scorer);
      const auto tables = sgqa::retrieve(q, corpus, config);
      sgqa::SupportModelBuilder builder(q, tables, corpus.join_map, *scorer,
                                        config.thresholds, config.constants,
                                        config.weights);
      builder.build_variables();
      builder.build_constraints();
      const auto problem =
          sgqa::apply_ablation(builder.problem(), config.ablation);
      jq["features"] =
          sgqa::extract_features(*sel.support, problem, q).to_json();
    }
    out.push_back(jq);
  }
  if (out_file.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::ofstream f(out_file);
    f << out.dump(2) << '\n';
    std::cout << "explanations written to " << out_file << "\n";
  }
  return 0;
}

int cmd_perturb(const std::string& questions_file,
                const std::string& freq_words_file, const std::string& out_file,
                int variants, int pool) {
  std::ifstream freq_in(freq_words_file);
  if (!freq_in)
    throw std::runtime_error("cannot open frequency word list " +
                             freq_words_file);
  std::vector<std::string> freq_words;
  std::string word;
  while (freq_in >> word) freq_words.push_back(word);

  const auto questions = sgqa::load_questions(questions_file);
  std::ofstream out(out_file);
  if (!out) throw std::runtime_error("cannot open output file " + out_file);
  long written = 0;
  for (const auto& q : questions) {
    for (const auto& variant :
         sgqa::perturb_question(q, freq_words, variants, pool)) {
      json j;
      j["id"] = variant.id;
      j["question"] = variant.text;
      std::vector<std::string> options;
      for (const auto& o : variant.options) options.push_back(o.text);
      j["options"] = options;
      j["answerKey"] = *variant.answer_key;
      out << j.dump() << '\n';
      ++written;
    }
  }
  std::cout << written << " perturbed questions written to " << out_file
            << "\n";
  return 0;
}

int cmd_ensemble(const CommonOpts& opts, bool training,
                 const std::string& scores_dir, const std::string& model_file,
                 const std::string& report_file) {
  const auto config = make_config(opts);
  const auto corpus = load(opts, config);
  const auto questions =
      sgqa::load_questions(opts.questions_file, corpus.stopwords);

  // per-question option feature rows
  std::vector<std::vector<std::vector<double>>> rows;
  for (const auto& q : questions) {
    const auto analyses = sgqa::analyze_options(q, corpus, config);
    std::vector<sgqa::FeatureVector> graph_features;
    std::vector<double> own_scores;
    for (const auto& a : analyses) {
      graph_features.push_back(a.features);
      own_scores.push_back(a.feasible ? a.objective : 0.0);
    }
    auto base = load_score_files(scores_dir, q.id, q.option_count());
    base.push_back({"support-graph", own_scores});
    rows.push_back(sgqa::assemble_option_features(base, graph_features));
  }

  if (training) {
    std::vector<sgqa::TrainingExample> data;
    for (size_t i = 0; i < questions.size(); ++i) {
      if (!questions[i].answer_key)
        throw std::runtime_error("question '" + questions[i].id +
                                 "' has no answer key; cannot train");
      for (int m = 0; m < questions[i].option_count(); ++m)
        data.push_back({rows[i][m], m == *questions[i].answer_key ? 1 : 0});
    }
    const auto model = sgqa::train_ensemble(data);
    std::ofstream out(model_file);
    out << model.to_json().dump(2) << '\n';
    std::cout << "model written to " << model_file << "\n";
    return 0;
  }

  std::ifstream min(model_file);
  if (!min) throw std::runtime_error("cannot open model file " + model_file);
  json mj;
  min >> mj;
  const auto model = sgqa::EnsembleModel::from_json(mj);
  double total = 0.0;
  long scored = 0;
  json report = json::array();
  for (size_t i = 0; i < questions.size(); ++i) {
    const auto probs = sgqa::predict_ensemble(model, rows[i]);
    const auto tie = sgqa::ensemble_answer(probs);
    json jq;
    jq["id"] = questions[i].id;
    jq["probabilities"] = probs;
    jq["tie"] = tie;
    std::cout << questions[i].id << ":";
    for (int m : tie) std::cout << " " << questions[i].options[m].text;
    if (questions[i].answer_key) {
      double score = 0.0;
      for (int m : tie)
        if (m == *questions[i].answer_key)
          score = 1.0 / static_cast<double>(tie.size());
      jq["score"] = score;
      total += score;
      ++scored;
      std::cout << "  (score " << score << ")";
    }
    std::cout << "\n";
    report.push_back(jq);
  }
  if (scored > 0)
    std::cout << "aggregate: " << 100.0 * total / scored << "\n";
  if (!report_file.empty()) {
    std::ofstream out(report_file);
    out << report.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"question answering over semi-structured tables"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string report_file, out_file, freq_words_file, scores_dir, model_file;
  int variants = 10, pool = 30;

  auto add_common = [&opts](CLI::App* cmd, bool needs_corpus = true) {
    if (needs_corpus)
      cmd->add_option("--corpus", opts.corpus_dir, "corpus directory")
          ->required();
    cmd->add_option("--config", opts.config_file, "key/value config file");
    cmd->add_option("--ablation", opts.ablation,
                    "none | no_multirow | no_relation_match");
    cmd->add_option("--stopwords", opts.stopwords_file, "stopword list file");
  };

  auto* answer = app.add_subcommand("answer", "answer questions");
  add_common(answer);
  answer->add_option("--question,--questions", opts.questions_file,
                     "questions file (JSONL)")
      ->required();

  auto* eval = app.add_subcommand("eval", "evaluate a dataset");
  add_common(eval);
  eval->add_option("--questions", opts.questions_file, "questions file (JSONL)")
      ->required();
  eval->add_option("--report", report_file, "write a JSON report here");

  auto* explain = app.add_subcommand("explain", "dump support graphs as JSON");
  add_common(explain);
  explain
      ->add_option("--question,--questions", opts.questions_file,
                   "questions file (JSONL)")
      ->required();
  explain->add_option("--out", out_file, "output file (default stdout)");

  auto* perturb =
      app.add_subcommand("perturb", "generate perturbed question variants");
  perturb->add_option("--questions", opts.questions_file, "questions file")
      ->required();
  perturb
      ->add_option("--freq-words", freq_words_file,
                   "frequency-ranked word list, one word per line")
      ->required();
  perturb->add_option("--out", out_file, "output JSONL file")->required();
  perturb->add_option("--variants", variants, "variants per question");
  perturb->add_option("--pool", pool, "replacement pool size");

  auto* ensemble = app.add_subcommand("ensemble", "solver combination");
  ensemble->require_subcommand(1);
  auto* train = ensemble->add_subcommand("train", "fit the combination model");
  auto* predict = ensemble->add_subcommand("predict", "apply a trained model");
  for (auto* cmd : {train, predict}) {
    add_common(cmd);
    cmd->add_option("--questions", opts.questions_file,
                    "questions file (JSONL)")
        ->required();
    cmd->add_option("--scores", scores_dir,
                    "directory of per-solver score files")
        ->required();
    cmd->add_option("--model", model_file, "model file")->required();
  }
  predict->add_option("--report", report_file, "write per-question JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(answer)) return cmd_answer(opts);
    if (app.got_subcommand(eval)) return cmd_eval(opts, report_file);
    if (app.got_subcommand(explain)) return cmd_explain(opts, out_file);
    if (app.got_subcommand(perturb))
      return cmd_perturb(opts.questions_file, freq_words_file, out_file,
                         variants, pool);
    if (app.got_subcommand(ensemble))
      return cmd_ensemble(opts, ensemble->got_subcommand(train), scores_dir,
                          model_file, report_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
