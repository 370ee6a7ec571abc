#include "ruleproof/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ruleproof/datagen.hpp"
#include "ruleproof/decoder.hpp"
#include "ruleproof/errors.hpp"
#include "ruleproof/evaluation.hpp"
#include "ruleproof/jsonl.hpp"
#include "ruleproof/parallel.hpp"
#include "ruleproof/potentials.hpp"
#include "ruleproof/random.hpp"
#include "ruleproof/reasoner.hpp"

namespace ruleproof {

namespace {

namespace fs = std::filesystem;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

// Reads the whole named file, or `fallback` for "" and "-".
class Input {
 public:
  Input(const std::string& path, std::istream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw DataError("cannot open input '" + path + "'");
    stream_ = &file_;
  }
  std::istream& get() { return *stream_; }

 private:
  std::ifstream file_;
  std::istream* stream_;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback), path_(path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw DataError("cannot open output '" + path + "'");
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw DataError("write failed" + (path_.empty() ? std::string() : " for '" + path_ + "'"));
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
  std::string path_;
};

std::vector<Theory> load_theories(const std::string& path, std::istream& fallback) {
  Input in(path, fallback);
  return read_theories(in.get());
}

struct QuestionRef {
  const Theory* theory;
  const Question* question;
};

std::vector<QuestionRef> all_questions(const std::vector<Theory>& theories) {
  std::vector<QuestionRef> out;
  for (const auto& t : theories)
    for (const auto& q : t.questions) out.push_back({&t, &q});
  return out;
}

bool has_gold(const Question& q) { return q.answer.has_value() && q.proofs && !q.proofs->empty(); }

// Computes one output line per item on `threads` workers; empty lines are
// dropped. Lines are written in item order.
template <typename T, typename Fn>
void write_ordered(const std::vector<T>& items, int threads, std::ostream& out, Fn&& fn) {
  std::vector<std::string> lines(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) { lines[i] = fn(items[i], i); });
  for (const auto& line : lines)
    if (!line.empty()) out << line << '\n';
}

void add_io(CLI::App* sub, std::string& input, std::string& output, const std::string& what) {
  sub->add_option("input", input, what + " (standard input when omitted)")->check(CLI::ExistingFile | CLI::IsMember({"-"}));
  sub->add_option("-o,--output", output, "Output file (standard output when omitted)");
}

void add_threads(CLI::App* sub, int& threads) {
  sub->add_option("--threads", threads, "Worker threads; output order does not depend on it")
      ->check(CLI::Range(1, 256));
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::istream& in_stream, std::ostream& out_stream,
                std::ostream& err_stream) {
  Streams io{in_stream, out_stream, err_stream};
  CLI::App app{"Rule-based theory reasoning, proof decoding and evaluation toolkit.", "ruleproof"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string input, output;
  int threads = 1;

  // generate
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  auto* generate = app.add_subcommand("generate", "Generate train/dev/test theory files and a manifest");
  generate->add_option("--config", config_path, "Generator config JSON; absent fields take defaults")
      ->check(CLI::ExistingFile);
  generate->add_option("--seed", seed, "Base seed; overrides the config seed")->required();
  generate->add_option("-o,--output-dir", out_dir, "Directory for the split files and manifest.json")->required();
  add_threads(generate, threads);

  auto* answer = app.add_subcommand("answer", "Answer every question under closed-world semantics");
  add_io(answer, input, output, "Theories JSONL");
  add_threads(answer, threads);

  int max_proofs = kDefaultMaxProofs;
  auto* prove_cmd = app.add_subcommand("prove", "Annotate questions with answers, minimal proofs and depths");
  add_io(prove_cmd, input, output, "Theories JSONL");
  prove_cmd->add_option("--max-proofs", max_proofs, "Proofs kept per question")->check(CLI::Range(1, 1000));
  add_threads(prove_cmd, threads);

  auto* mask_export = app.add_subcommand("mask-export", "Export node and masked edge labels per question");
  add_io(mask_export, input, output, "Theories JSONL with gold proofs");
  add_threads(mask_export, threads);

  double noise = 0.0, delta = 0.05;
  bool adversarial = false;
  auto* oracle = app.add_subcommand("oracle-potentials", "Noisy gold-indicator potentials per question");
  add_io(oracle, input, output, "Theories JSONL with gold proofs");
  oracle->add_option("--noise", noise, "Noise level in [0, 0.5)")->check(CLI::Range(0.0, 0.499999999));
  oracle->add_option("--seed", seed, "Base seed")->required();
  oracle->add_flag("--adversarial", adversarial, "Lower one gold bridge edge to 0.5 - delta");
  oracle->add_option("--delta", delta, "Bridge margin for --adversarial")->check(CLI::Range(0.0, 0.5));
  add_threads(oracle, threads);

  std::string train_path, dev_path;
  TrainConfig train_cfg;
  auto* train = app.add_subcommand("train-baseline", "Fit the lexical edge scorer");
  train->add_option("--train", train_path, "Training theories JSONL")->required()->check(CLI::ExistingFile);
  train->add_option("--dev", dev_path, "Held-out theories JSONL for accuracy reporting")->check(CLI::ExistingFile);
  train->add_option("-o,--output", output, "Model JSON (standard output when omitted)");
  train->add_option("--epochs", train_cfg.epochs, "Passes over the training edges")->check(CLI::Range(0, 1000000));
  train->add_option("--learning-rate", train_cfg.learning_rate, "Step size")->check(CLI::PositiveNumber);
  train->add_option("--batch-size", train_cfg.batch_size, "Minibatch size; 0 for full batch");
  train->add_option("--l2", train_cfg.l2, "L2 penalty")->check(CLI::NonNegativeNumber);
  train->add_option("--seed", train_cfg.seed, "Minibatch shuffling seed");

  std::string model_path;
  auto* score = app.add_subcommand("score-edges", "Lexical baseline potentials per question");
  add_io(score, input, output, "Theories JSONL with gold proofs");
  score->add_option("--model", model_path, "Model JSON from train-baseline")->required()->check(CLI::ExistingFile);
  add_threads(score, threads);

  bool no_connectivity = false, unconstrained = false;
  auto* decode = app.add_subcommand("decode", "Decode potentials into proof predictions");
  add_io(decode, input, output, "Potentials JSONL");
  auto* no_conn_flag = decode->add_flag("--no-connectivity", no_connectivity, "Drop the connectivity constraint");
  decode->add_flag("--unconstrained", unconstrained, "Threshold every ordered pair with no structural constraints")
      ->excludes(no_conn_flag);
  add_threads(decode, threads);

  std::string theories_path, json_path, label;
  auto* eval = app.add_subcommand("eval", "Score predictions against gold theories");
  eval->add_option("--theories", theories_path, "Gold theories JSONL")->required()->check(CLI::ExistingFile);
  add_io(eval, input, output, "Predictions JSONL");
  eval->add_option("--json", json_path, "Also write the report as JSON");
  eval->add_option("--label", label, "Ablation label shown in the report header");
  add_threads(eval, threads);

  auto* critical = app.add_subcommand("critical", "Sentences whose removal flips each answer");
  add_io(critical, input, output, "Theories JSONL");
  add_threads(critical, threads);

  auto* render = app.add_subcommand("render-dot", "Write one DOT file per gold proof");
  render->add_option("input", input, "Theories JSONL (standard input when omitted)")
      ->check(CLI::ExistingFile | CLI::IsMember({"-"}));
  render->add_option("-o,--output-dir", out_dir, "Destination directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    io.out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    io.err << "error: " << e.what() << "\n";
    if (!app.get_subcommands().empty()) io.err << "run '" << app.get_subcommands().front()->get_name()
                                               << " --help' for usage\n";
    else io.err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (generate->parsed()) {
      GenConfig cfg;
      if (!config_path.empty()) {
        Input cin_cfg(config_path, io.in);
        std::string text((std::istreambuf_iterator<char>(cin_cfg.get())), std::istreambuf_iterator<char>());
        cfg = config_from_json(parse_json(text));
      }
      cfg.seed = seed;
      cfg.validate();
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw DataError("cannot create output directory '" + out_dir + "': " + ec.message());
      const Dataset d = generate_dataset(cfg, threads);
      for (const auto& [name, part] : {std::pair{"train", &d.train}, {"dev", &d.dev}, {"test", &d.test}}) {
        Output o((fs::path(out_dir) / (std::string(name) + ".theories.jsonl")).string(), io.out);
        write_theories(o.get(), *part);
        o.finish();
      }
      Output m((fs::path(out_dir) / "manifest.json").string(), io.out);
      m.get() << d.manifest.dump(2) << '\n';
      m.finish();
      io.err << "generated " << d.train.size() + d.dev.size() + d.test.size() << " theories in " << out_dir << "\n";
    } else if (answer->parsed()) {
      const auto theories = load_theories(input, io.in);
      Output o(output, io.out);
      write_ordered(theories, threads, o.get(), [](const Theory& t, std::size_t) {
        const Closure c = closure(t);
        std::string lines;
        for (const auto& q : t.questions) {
          Json j;
          j["theory_id"] = t.id;
          j["question_id"] = q.id();
          j["answer"] = answer_question(t, c, q.literal);
          if (!lines.empty()) lines += '\n';
          lines += dump_line(j);
        }
        return lines;
      });
      o.finish();
    } else if (prove_cmd->parsed()) {
      auto theories = load_theories(input, io.in);
      parallel_for(theories.size(), threads, [&](std::size_t i) {
        Theory& t = theories[i];
        const Closure c = closure(t);
        for (auto& q : t.questions) {
          q.answer = answer_question(t, c, q.literal);
          q.proofs = prove(t, q, max_proofs);
          if (q.proofs->empty()) {
            q.depth.reset();
            continue;
          }
          int depth = 0;
          for (const auto& p : *q.proofs) depth = std::max(depth, proof_depth(p));
          q.depth = depth;
        }
      });
      Output o(output, io.out);
      write_theories(o.get(), theories);
      o.finish();
    } else if (mask_export->parsed()) {
      const auto theories = load_theories(input, io.in);
      const auto questions = all_questions(theories);
      std::size_t skipped = 0;
      for (const auto& r : questions) skipped += !has_gold(*r.question);
      Output o(output, io.out);
      write_ordered(questions, threads, o.get(), [](const QuestionRef& r, std::size_t) {
        return has_gold(*r.question) ? dump_line(labels_record(*r.theory, *r.question)) : std::string();
      });
      o.finish();
      if (skipped) io.err << "warning: skipped " << skipped << " question(s) without gold proofs\n";
    } else if (oracle->parsed()) {
      const auto theories = load_theories(input, io.in);
      const auto questions = all_questions(theories);
      std::size_t skipped = 0;
      for (const auto& r : questions) skipped += !has_gold(*r.question);
      Output o(output, io.out);
      write_ordered(questions, threads, o.get(), [&](const QuestionRef& r, std::size_t i) {
        if (!has_gold(*r.question)) return std::string();
        const ProofGraph& gold = r.question->proofs->front();
        const std::uint64_t s = derive_seed(seed, i);
        const Potentials p = adversarial ? adversarial_potentials(*r.theory, gold, noise, delta, s)
                                         : oracle_potentials(*r.theory, gold, noise, s);
        return dump_line(potentials_record(r.theory->id, r.question->id(), *r.question->answer, p));
      });
      o.finish();
      if (skipped) io.err << "warning: skipped " << skipped << " question(s) without gold proofs\n";
    } else if (train->parsed()) {
      const auto collect = [&](const std::string& path) {
        std::vector<LabeledEdge> edges;
        for (const auto& t : load_theories(path, io.in))
          for (const auto& q : t.questions) {
            auto e = labeled_edges(t, q);
            edges.insert(edges.end(), e.begin(), e.end());
          }
        return edges;
      };
      const auto train_edges = collect(train_path);
      const LinearScorer s = fit_linear_scorer(train_edges, train_cfg);
      io.err << "train edges " << train_edges.size() << ", accuracy " << edge_accuracy(s, train_edges) << "\n";
      if (!dev_path.empty()) {
        const auto dev_edges = collect(dev_path);
        LinearScorer untrained;
        io.err << "dev edges " << dev_edges.size() << ", accuracy " << edge_accuracy(s, dev_edges)
               << ", untrained accuracy " << edge_accuracy(untrained, dev_edges) << "\n";
      }
      Output o(output, io.out);
      o.get() << scorer_to_json(s).dump(2) << '\n';
      o.finish();
    } else if (score->parsed()) {
      LinearScorer s;
      {
        Input m(model_path, io.in);
        std::string text((std::istreambuf_iterator<char>(m.get())), std::istreambuf_iterator<char>());
        s = scorer_from_json(parse_json(text));
      }
      const auto theories = load_theories(input, io.in);
      const auto questions = all_questions(theories);
      std::size_t skipped = 0;
      for (const auto& r : questions) skipped += !has_gold(*r.question);
      Output o(output, io.out);
      write_ordered(questions, threads, o.get(), [&](const QuestionRef& r, std::size_t) {
        if (!has_gold(*r.question)) return std::string();
        const bool a = answer_question(*r.theory, *r.question);
        return dump_line(potentials_record(r.theory->id, r.question->id(), a,
                                           lexical_potentials(*r.theory, *r.question, s)));
      });
      o.finish();
      if (skipped) io.err << "warning: skipped " << skipped << " question(s) without gold proofs\n";
    } else if (decode->parsed()) {
      std::vector<PotentialsRecord> records;
      {
        Input in(input, io.in);
        for_each_jsonl(in.get(), [&](const Json& j, int line) {
          try {
            records.push_back(potentials_from_json(j));
          } catch (const ParseError&) {
            throw;
          } catch (const DataError& e) {
            throw DataError("potentials line " + std::to_string(line) + ": " + e.what());
          }
        });
      }
      std::vector<char> relaxed(records.size(), 0);
      Output o(output, io.out);
      write_ordered(records, threads, o.get(), [&](const PotentialsRecord& r, std::size_t i) {
        DecodeResult d;
        if (unconstrained) d = decode_unconstrained(r.potentials);
        else d = decode_with_fallback(r.potentials, DecodeOptions{!no_connectivity});
        relaxed[i] = d.connectivity_relaxed;
        return dump_line(prediction_record(r.theory_id, r.question_id, r.answer, d));
      });
      o.finish();
      const auto n_relaxed = std::count(relaxed.begin(), relaxed.end(), 1);
      if (n_relaxed) io.err << "warning: connectivity relaxed for " << n_relaxed << " question(s)\n";
    } else if (eval->parsed()) {
      const auto theories = load_theories(theories_path, io.in);
      std::vector<PredictionRecord> predictions;
      {
        Input in(input, io.in);
        predictions = read_predictions(in.get());
      }
      const Report r = aggregate_report(theories, predictions, label, threads);
      if (!metric_order_holds(r)) throw InvariantError("report violates PA <= min(NA, EA) or FA <= min(QA, PA)");
      Output o(output, io.out);
      o.get() << format_report(r);
      o.finish();
      if (!json_path.empty()) {
        Output j(json_path, io.out);
        j.get() << report_to_json(r).dump(2) << '\n';
        j.finish();
      }
      if (r.skipped) io.err << "warning: skipped " << r.skipped << " question(s) without gold proofs\n";
    } else if (critical->parsed()) {
      const auto theories = load_theories(input, io.in);
      const auto questions = all_questions(theories);
      Output o(output, io.out);
      write_ordered(questions, threads, o.get(), [](const QuestionRef& r, std::size_t) {
        const std::set<std::string> ids = critical_sentences(*r.theory, *r.question);
        // canonical node order: facts, rules, then NAF, each by index
        std::vector<ProofNode> nodes;
        for (const auto& id : ids) nodes.push_back(ProofNode::parse(id));
        std::sort(nodes.begin(), nodes.end());
        Json list = Json::array();
        for (const auto& n : nodes) list.push_back(n.id());
        Json j;
        j["theory_id"] = r.theory->id;
        j["question_id"] = r.question->id();
        j["answer"] = answer_question(*r.theory, *r.question);
        j["critical"] = std::move(list);
        return dump_line(j);
      });
      o.finish();
    } else if (render->parsed()) {
      const auto theories = load_theories(input, io.in);
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw DataError("cannot create output directory '" + out_dir + "': " + ec.message());
      std::size_t written = 0;
      for (const auto& t : theories) {
        for (const auto& q : t.questions) {
          const std::vector<ProofGraph> proofs = q.proofs ? *q.proofs : prove(t, q);
          for (std::size_t k = 0; k < proofs.size(); ++k) {
            std::vector<std::pair<ProofNode, std::string>> labels;
            for (const auto& n : proofs[k].nodes) labels.emplace_back(n, t.sentence_text(n));
            const std::string name = t.id + "_" + q.id() + "_" + std::to_string(k + 1);
            Output o((fs::path(out_dir) / (name + ".dot")).string(), io.out);
            o.get() << to_dot(proofs[k], name, labels);
            o.finish();
            ++written;
          }
        }
      }
      io.err << "wrote " << written << " DOT file(s) to " << out_dir << "\n";
    }
  } catch (const DataError& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::logic_error& e) {
    io.err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace ruleproof
