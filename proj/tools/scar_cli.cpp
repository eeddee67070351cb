/*
 * Copyright 2026 The scar Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// scar: command-line front end.
//
//   scar attribute --input req.json [--method exact] [--oracle lexicon:FILE]
//   scar shape --input traj.json [--alpha 0.8] [--beta 0.05]
//   scar simulate --env env.json --config train.json --out DIR [--seeds N]
//   scar serve --bind 127.0.0.1:8080
//
// Exit codes: 0 success, 2 invalid input, 3 oracle or transport failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "scar/error.hpp"
#include "scar/interface/api.hpp"
#include "scar/interface/service.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using scar::ErrorKind;
using scar::fail;
using scar::require;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitUpstream = 3;

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kInvalidArgument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) { return scar::interface::parse_document(read_input(path)); }

void print_error(const std::string& message, std::string_view kind) {
  std::cout << json{{"error", message}, {"kind", std::string(kind)}}.dump() << std::endl;
}

json oracle_selector(const std::string& spec) {
  if (spec.rfind("lexicon:", 0) == 0) return json{{"lexicon", read_json(spec.substr(8))}};
  if (spec.rfind("remote:", 0) == 0) return json{{"remote", spec.substr(7)}};
  fail(ErrorKind::kInvalidArgument, "--oracle must be lexicon:FILE or remote:URL");
}

struct AttributeArgs {
  std::string input = "-";
  std::optional<std::string> method, granularity, mask, oracle;
  std::optional<std::uint64_t> seed, permutations;
};

int run_attribute(const AttributeArgs& a) {
  json doc = read_json(a.input);
  require(doc.is_object(), ErrorKind::kInvalidArgument, "request must be a JSON object");
  if (a.method) doc["method"] = *a.method;
  if (a.granularity) doc["granularity"] = *a.granularity;
  if (a.mask) doc["mask"] = *a.mask;
  if (a.seed) doc["seed"] = *a.seed;
  if (a.permutations) doc["n_permutations"] = *a.permutations;
  if (a.oracle) doc["oracle"] = oracle_selector(*a.oracle);
  const auto out = scar::interface::attribute(scar::interface::parse_attribute_request(doc));
  std::cout << out.body.dump() << std::endl;
  return kExitOk;
}

struct ShapeArgs {
  std::string input = "-";
  std::optional<double> alpha, beta;
};

int run_shape(const ShapeArgs& a) {
  json doc = read_json(a.input);
  require(doc.is_object(), ErrorKind::kInvalidArgument, "trajectory must be a JSON object");
  if (a.alpha) doc["alpha"] = *a.alpha;
  if (a.beta) doc["beta"] = *a.beta;
  std::cout << scar::interface::shape(scar::interface::parse_shape_request(doc)).dump() << std::endl;
  return kExitOk;
}

struct SimulateArgs {
  std::string env, config, out;
  std::optional<std::uint64_t> seeds;
};

constexpr const char* kCsvName = "runs.csv";
constexpr const char* kSummaryName = "summary.json";
constexpr const char* kSvgName = "curve.svg";

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::kInvalidArgument, "cannot write '" + path.string() + "'");
  f << content;
  f.close();
  require(!f.fail(), ErrorKind::kInvalidArgument, "cannot write '" + path.string() + "'");
}

int run_simulate(const SimulateArgs& a) {
  const auto spec = scar::sim::EnvSpec::from_json(read_json(a.env));
  auto cfg = scar::interface::parse_bench_config(read_json(a.config));
  if (a.seeds) {
    require(*a.seeds > 0, ErrorKind::kInvalidArgument, "--seeds must be positive");
    cfg.seeds.clear();
    for (std::uint64_t s = 1; s <= *a.seeds; ++s) cfg.seeds.push_back(s);
  }
  const auto env = scar::sim::make_env(spec);
  const fs::path dir(a.out);
  std::error_code ec;
  const bool created = fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorKind::kInvalidArgument, "cannot create '" + a.out + "'");
  const fs::path files[] = {dir / kCsvName, dir / kSummaryName, dir / kSvgName};
  try {
    const auto report = scar::sim::compare_schemes(env, cfg);
    std::ostringstream csv;
    scar::sim::write_csv(report, csv);
    write_file(files[0], csv.str());
    write_file(files[1], scar::sim::summary_json(report).dump(2) + "\n");
    write_file(files[2], scar::sim::render_svg(report));
    std::cout << json{{"out", a.out}, {"rows", report.row_count()}}.dump() << std::endl;
  } catch (...) {
    for (const auto& f : files) fs::remove(f, ec);
    if (created) fs::remove(dir, ec);
    throw;
  }
  return kExitOk;
}

int run_serve(const std::string& bind) {
  const auto colon = bind.rfind(':');
  require(colon != std::string::npos, ErrorKind::kInvalidArgument, "--bind must be HOST:PORT");
  int port = -1;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
  }
  require(port >= 0 && port <= 65535, ErrorKind::kInvalidArgument, "--bind port must be 0..65535");
  scar::interface::Service service;
  const int bound = service.bind(bind.substr(0, colon), port);
  std::cout << json{{"listening", bind.substr(0, colon) + ":" + std::to_string(bound)}}.dump() << std::endl;
  service.listen();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapley credit assignment for sequence rewards"};
  app.require_subcommand(1);

  AttributeArgs attr;
  auto* attribute = app.add_subcommand("attribute", "Attribute a scalar reward to text units");
  attribute->add_option("--input", attr.input, "request JSON file, '-' for stdin");
  attribute->add_option("--method", attr.method, "exact|sampled|owen");
  attribute->add_option("--granularity", attr.granularity, "token|span|sentence");
  attribute->add_option("--mask", attr.mask, "space_fill|concat");
  attribute->add_option("--seed", attr.seed, "sampling seed");
  attribute->add_option("--permutations", attr.permutations, "permutations for sampled");
  attribute->add_option("--oracle", attr.oracle, "lexicon:FILE or remote:URL");

  ShapeArgs sh;
  auto* shape = app.add_subcommand("shape", "Build a shaped per-token reward");
  shape->add_option("--input", sh.input, "trajectory JSON file, '-' for stdin");
  shape->add_option("--alpha", sh.alpha, "weight on the dense reward");
  shape->add_option("--beta", sh.beta, "KL coefficient");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the toy-environment benchmark");
  simulate->add_option("--env", sim.env, "environment JSON")->required();
  simulate->add_option("--config", sim.config, "training config JSON")->required();
  simulate->add_option("--out", sim.out, "output directory")->required();
  simulate->add_option("--seeds", sim.seeds, "use seeds 1..N");

  std::string bind = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--bind", bind, "HOST:PORT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(e.what(), "invalid_argument");
    return kExitInvalid;
  }

  try {
    if (*attribute) return run_attribute(attr);
    if (*shape) return run_shape(sh);
    if (*simulate) return run_simulate(sim);
    if (*serve) return run_serve(bind);
  } catch (const scar::Error& e) {
    print_error(e.what(), to_string(e.kind()));
    return e.category() == scar::ErrorCategory::kUpstream ? kExitUpstream : kExitInvalid;
  } catch (const std::exception& e) {
    print_error(e.what(), "internal");
    return kExitInvalid;
  }
  return kExitInvalid;
}
