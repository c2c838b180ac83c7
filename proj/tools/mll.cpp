// mll: preprocess | experiment | train | predict | report

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mll/mll.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kPartialGrid = 3, kSchemaMismatch = 4 };

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw mll::ParseError("input file '" + path + "' does not exist");
}

std::ofstream open_out(const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mll::ParseError("cannot write '" + path + "'");
  return out;
}

int cmd_preprocess(const std::string& input, const std::string& output, std::string report_path) {
  require_file(input);
  auto raw = mll::read_csv_file(input, {}, "?");
  auto [ds, report] = mll::preprocess_diabetes(raw);
  if (report_path.empty()) report_path = output + ".report.txt";
  mll::write_arff_file(output, ds);
  auto rep = open_out(report_path);
  mll::write_report(rep, report);
  std::cout << "rows: " << report.rows_in << " in, " << report.rows_out << " out ("
            << report.rows_dropped_missing_race << " missing race, " << report.rows_dropped_invalid_gender
            << " invalid gender)\n"
            << "attributes: " << report.attributes_out << " (" << report.labels_out << " labels)\n"
            << "wrote " << output << " and " << report_path << '\n';
  return kOk;
}

void override_seeds(mll::GridSpec& grid, std::uint64_t seed) {
  grid.seed = seed;
  for (auto& m : grid.models) {
    m.seed = seed;
    if (m.chain.kind == mll::ChainOrder::Kind::Random) m.chain.seed = seed;
  }
  for (auto& s : grid.samples)
    if (s.strategy.kind == mll::SampleStrategy::Kind::Random) s.strategy.seed = seed;
}

int cmd_experiment(const std::string& config_path, std::string output, std::optional<std::uint64_t> seed,
                   std::optional<std::size_t> threads) {
  require_file(config_path);
  auto cfg = mll::load_experiment_config(config_path);
  if (seed) override_seeds(cfg.grid, *seed);
  if (output.empty()) output = cfg.output;
  const auto n_threads = threads.value_or(cfg.threads);

  require_file(cfg.dataset.path);
  auto ds = mll::load_dataset(cfg.dataset);
  std::cerr << "dataset: " << ds.size() << " instances, " << ds.label_count() << " labels\n";

  fs::create_directories(output);
  const auto tsv_path = (fs::path(output) / "results.tsv").string();
  auto tsv = open_out(tsv_path);
  const auto labels = ds.schema().label_names();
  mll::ResultTable table;
  table.columns = mll::result_columns(labels);
  mll::write_tsv_line(tsv, table.columns);
  tsv.flush();

  const std::size_t total = cfg.grid.samples.size() * cfg.grid.models.size() * cfg.grid.evaluations.size();
  std::size_t failed = 0;
  auto sink = [&](const mll::GridRow& row) {
    auto cells = mll::result_row(row, labels.size());
    mll::write_tsv_line(tsv, cells);
    tsv.flush();
    table.rows.push_back(std::move(cells));
    if (!row.ok) ++failed;
    std::cerr << '[' << row.cell + 1 << '/' << total << "] " << row.sample.size << ' ' << row.model.name() << ' '
              << row.method.name() << ": " << (row.ok ? "ok" : "FAILED: " + row.error) << '\n';
  };
  mll::run_grid(ds, cfg.grid, sink, n_threads);

  const auto tables_path = (fs::path(output) / "tables.txt").string();
  auto tables = open_out(tables_path);
  mll::write_text_tables(tables, table);
  std::cout << "wrote " << tsv_path << " and " << tables_path << '\n';
  if (failed) {
    std::cerr << failed << " of " << total << " cells failed\n";
    return kPartialGrid;
  }
  return kOk;
}

int cmd_train(const std::string& config_path, const std::string& input, const std::string& output,
              std::optional<std::uint64_t> seed) {
  require_file(config_path);
  auto cfg = mll::load_train_config(config_path);
  if (!input.empty()) cfg.dataset.path = input;
  if (seed) cfg.model.seed = *seed;
  require_file(cfg.dataset.path);
  auto ds = mll::load_dataset(cfg.dataset);
  auto model = mll::train_model(ds, cfg.model);
  if (auto parent = fs::path(output).parent_path(); !parent.empty()) fs::create_directories(parent);
  mll::save_model(output, model);
  std::cout << "trained " << cfg.model.name() << " on " << ds.size() << " instances; wrote " << output << '\n';
  return kOk;
}

int cmd_predict(const std::string& model_path, const std::string& input, const std::string& output) {
  require_file(model_path);
  require_file(input);
  auto model = mll::load_model(model_path);
  const auto labels = model.label_names();
  mll::MultiLabelDataset ds = fs::path(input).extension() == ".csv"
                                  ? mll::read_csv_file(input, labels, "?")
                                  : mll::read_arff_file(input, model.label_count());
  mll::require_schema(model, ds.schema());
  const auto predictions = mll::predict_all(model, ds);

  auto out = open_out(output);
  std::vector<std::string> head = {"row_id"};
  for (const auto& prefix : {"conf:", "bit:", "rank:"})
    for (const auto& l : labels) head.push_back(prefix + l);
  mll::write_tsv_line(out, head);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& p = predictions[i];
    std::vector<std::string> row = {std::to_string(ds.instance(i).row_id)};
    for (double c : p.confidences) row.push_back(mll::format_number(c));
    for (auto b : p.bipartition) row.push_back(b ? "1" : "0");
    for (auto r : p.ranking) row.push_back(std::to_string(r));
    mll::write_tsv_line(out, row);
  }
  std::cout << "wrote " << predictions.size() << " predictions to " << output << '\n';
  return kOk;
}

int cmd_report(const std::string& input, const std::string& output) {
  require_file(input);
  std::ifstream in(input, std::ios::binary);
  auto table = mll::read_tsv(in);
  if (output.empty()) {
    mll::write_text_tables(std::cout, table);
  } else {
    auto out = open_out(output);
    mll::write_text_tables(out, table);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-label classification toolkit"};
  app.require_subcommand(1);

  std::string input, output, config, model, report;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;

  auto* pre = app.add_subcommand("preprocess", "Diabetes CSV -> labelled ARFF plus a key=value report");
  pre->add_option("--input", input, "raw CSV")->required();
  pre->add_option("--output", output, "ARFF to write")->required();
  pre->add_option("--report", report, "report path (default: <output>.report.txt)");

  auto* exp = app.add_subcommand("experiment", "Run an experiment grid from a TOML config");
  exp->add_option("--config", config, "TOML config")->required();
  exp->add_option("--output", output, "output directory (default: from config)");
  exp->add_option("--seed", seed, "replaces every seed in the config");
  exp->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* train = app.add_subcommand("train", "Train one model and save it as JSON");
  train->add_option("--config", config, "TOML config with [dataset] and [model]")->required();
  train->add_option("--input", input, "dataset path (overrides the config)");
  train->add_option("--output", output, "model file to write")->required();
  train->add_option("--seed", seed, "model seed");

  auto* pred = app.add_subcommand("predict", "Predict with a saved model");
  pred->add_option("--model", model, "model JSON")->required();
  pred->add_option("--input", input, "ARFF or CSV data")->required();
  pred->add_option("--output", output, "predictions TSV")->required();

  auto* rep = app.add_subcommand("report", "Render plain-text tables from a results TSV");
  rep->add_option("--input", input, "results TSV")->required();
  rep->add_option("--output", output, "tables file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*pre) return cmd_preprocess(input, output, report);
    if (*exp) return cmd_experiment(config, output, seed, threads);
    if (*train) return cmd_train(config, input, output, seed);
    if (*pred) return cmd_predict(model, input, output);
    if (*rep) return cmd_report(input, output);
  } catch (const mll::SchemaMismatchError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSchemaMismatch;
  } catch (const mll::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const mll::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const mll::PreprocessError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const mll::RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
