// Copyright 2026 The EDL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line driver: kb-index, train-md, train-el, run, eval, diag.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "edl/pipeline.hpp"

namespace {

using edl::Error;
using edl::ErrorCode;
namespace pl = edl::pipeline;

struct Common {
  std::string config;
  std::vector<std::string> set;
  std::optional<size_t> workers;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "key = value config file")->required();
  cmd->add_option("-s,--set", c.set, "override, key=value (repeatable)");
  cmd->add_option("-w,--workers", c.workers, "documents processed in parallel");
  cmd->add_option("--seed", c.seed, "pipeline seed");
}

pl::PipelineConfig config_of(const Common& c) {
  std::map<std::string, std::string> overrides;
  for (const auto& s : c.set) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::InvalidConfig, "override '" + s + "' is not key=value");
    overrides[pl::detail::trim(s.substr(0, eq))] = pl::detail::trim(s.substr(eq + 1));
  }
  if (c.workers) overrides["workers"] = std::to_string(*c.workers);
  if (c.seed) overrides["seed"] = std::to_string(*c.seed);
  return pl::load_config(c.config, overrides);
}

// Single-line, machine-parseable failure report.
int fail(const std::string& code, const std::string& msg) {
  std::string flat = msg;
  for (char& ch : flat)
    if (ch == '\n' || ch == '\r') ch = ' ';
  std::cerr << "error code=" << code << " msg=" << flat << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entity discovery and linking pipeline"};
  app.require_subcommand(1);

  Common kb_opts, md_opts, el_opts, run_opts, diag_opts;
  auto* kb_cmd = app.add_subcommand("kb-index", "build the frozen KB index");
  add_common(kb_cmd, kb_opts);
  auto* md_cmd = app.add_subcommand("train-md", "train the mention detection ensembles");
  add_common(md_cmd, md_opts);
  auto* el_cmd = app.add_subcommand("train-el", "train the ranker ensemble");
  add_common(el_cmd, el_opts);
  auto* run_cmd = app.add_subcommand("run", "detect, link and cluster; write the submission");
  add_common(run_cmd, run_opts);
  std::string run_output;
  run_cmd->add_option("-o,--output", run_output, "submission path (overrides config)");
  auto* diag_cmd = app.add_subcommand("diag", "per-mention JSON lines on stdout");
  add_common(diag_cmd, diag_opts);

  std::string sys_path, gold_path, docs_path, report_path;
  auto* eval_cmd = app.add_subcommand("eval", "score a submission against gold");
  eval_cmd->add_option("--system", sys_path, "submission TSV")->required();
  eval_cmd->add_option("--gold", gold_path, "gold TSV")->required();
  eval_cmd->add_option("--docs", docs_path, "documents, for per-language rows");
  eval_cmd->add_option("-o,--output", report_path, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("InvalidArguments", e.what());
  }

  try {
    if (*kb_cmd) {
      auto n = pl::cmd_kb_index(config_of(kb_opts));
      std::cout << "indexed " << n << " entities\n";
    } else if (*md_cmd) {
      for (const auto& r : pl::cmd_train_md(config_of(md_opts)))
        std::cout << edl::md::to_string(r.kind) << " member " << r.member << ": train "
                  << r.train_sentences << " dev " << r.dev_sentences << " epochs " << r.epochs
                  << " -> " << r.path << '\n';
    } else if (*el_cmd) {
      auto r = pl::cmd_train_el(config_of(el_opts));
      std::cout << "instances " << r.instances << " skipped " << r.skipped << '\n';
      for (const auto& p : r.paths) std::cout << "-> " << p << '\n';
    } else if (*run_cmd) {
      auto c = config_of(run_opts);
      if (!run_output.empty()) c.output = run_output;
      auto n = pl::cmd_run(c);
      std::cout << "wrote " << n << " records to " << c.output << '\n';
    } else if (*diag_cmd) {
      pl::cmd_diag(config_of(diag_opts), std::cout);
    } else if (*eval_cmd) {
      auto rows = pl::cmd_eval(sys_path, gold_path, docs_path);
      if (report_path.empty()) {
        edl::eval::write_report(std::cout, rows);
      } else {
        std::ostringstream out;
        edl::eval::write_report(out, rows);
        pl::write_text_file(report_path, out.str());
      }
    }
  } catch (const Error& e) {
    return fail(edl::error_code_name(e.code()), e.detail());
  } catch (const std::exception& e) {
    return fail("Internal", e.what());
  }
  return 0;
}
