#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "stratwave/stratwave.hpp"

namespace fs = std::filesystem;
using namespace stratwave;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

struct Job {
  Scenario scenario;
  fs::path out;
};

int run_jobs(const std::vector<Job>& jobs, unsigned stages, bool honor_toggles, int workers) {
  std::vector<int> status(jobs.size(), 0);
  std::vector<std::string> lines(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < jobs.size();) {
      const auto& j = jobs[k];
      try {
        const auto r = run_scenario(j.scenario, j.out, stages, honor_toggles);
        status[k] = r.mandatory_failed ? kExitFailed : 0;
        lines[k] = j.scenario.name + ": " + (r.mandatory_failed ? "failed" : "ok") + " -> " +
                   (j.out / "report.json").string();
      } catch (const std::exception& e) {
        status[k] = kExitFailed;
        lines[k] = j.scenario.name + ": error: " + e.what();
      }
    }
  };
  const int n = std::clamp(workers, 1, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  int rc = 0;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    std::cout << lines[k] << '\n';
    rc = std::max(rc, status[k]);
  }
  return rc;
}

// A single file, or every *.json in a directory (one output folder each).
std::vector<Job> load_jobs(const fs::path& input, const std::string& out_override) {
  std::vector<Job> jobs;
  if (fs::is_directory(input)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(input))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError(input.string() + ": no scenario files");
    for (const auto& f : files) {
      auto sc = load_scenario(f);
      const fs::path base = out_override.empty() ? fs::path(sc.output) : fs::path(out_override);
      jobs.push_back({sc, base / sc.name});
    }
  } else {
    auto sc = load_scenario(input);
    jobs.push_back({sc, out_override.empty() ? fs::path(sc.output) : fs::path(out_override)});
  }
  return jobs;
}

const char* verdict(const ojson& j) {
  return j.is_object() && j.contains("verdict") ? j["verdict"].get_ref<const std::string&>().c_str()
                                                : "n/a";
}

int print_report(const fs::path& dir) {
  std::ifstream in(dir / "report.json");
  if (!in) {
    std::cerr << (dir / "report.json").string() << ": cannot open\n";
    return kExitConfig;
  }
  ojson r;
  try {
    r = ojson::parse(in);
  } catch (const std::exception& e) {
    std::cerr << (dir / "report.json").string() << ": " << e.what() << '\n';
    return kExitConfig;
  }
  std::cout << "scenario  " << r["scenario"].value("name", "?") << '\n';
  for (const auto& s : r["stages"]) {
    std::cout << "stage     " << s["name"].get<std::string>() << ": "
              << s["status"].get<std::string>();
    if (s.contains("error")) std::cout << " (" << s["error"]["message"].get<std::string>() << ')';
    std::cout << '\n';
  }
  if (r.contains("diagnostics")) {
    const auto& d = r["diagnostics"];
    std::cout << "M         " << d["M"].dump() << "\neps1      " << d["eps1"].dump()
              << "\neps2      " << d["eps2"].dump() << '\n';
  }
  if (r.contains("certificates")) {
    const auto& c = r["certificates"];
    for (const char* k : {"S1", "S2", "S3"})
      std::cout << k << "        " << verdict(c[k]) << "  margin " << c[k]["margin"].dump()
                << '\n';
    std::cout << "lemma     " << verdict(c["lemma"]) << '\n';
  }
  if (r.contains("eigen")) {
    const auto& p = r["eigen"]["operators"]["full"]["principal"];
    std::cout << "lambda1   " << (p.contains("lambda1") ? p["lambda1"].dump() : "error") << '\n';
  }
  if (r.contains("sweep"))
    std::cout << "sweep     " << r["sweep"]["classification"].get<std::string>() << "  axis "
              << r["sweep"]["axis"].dump() << '\n';
  std::cout << "status    " << r.value("status", "?") << '\n';
  return r.value("status", "") == "ok" ? 0 : kExitFailed;
}

int run_verify(const std::string& suite, int trials, std::uint64_t seed, int size) {
  SuiteSummary s;
  if (suite == "eigen-props")
    s = size > 0 ? verify_eigen_props(trials, seed, size) : verify_eigen_props(trials, seed);
  else if (suite == "perturbation")
    s = size > 0 ? verify_perturbation(trials, seed, size) : verify_perturbation(trials, seed);
  else if (suite == "max-principle")
    s = size > 0 ? verify_max_principle_suite(trials, seed, size)
                 : verify_max_principle_suite(trials, seed);
  else if (suite == "bnv")
    s = size > 0 ? verify_bnv_bound(trials, seed, size) : verify_bnv_bound(trials, seed);
  auto j = to_json(s);
  std::cout << suite << ": " << s.trials << " checks, " << s.failures
            << " failures, worst margin " << detail::fmt_double(s.worst_margin) << '\n';
  std::cout << j["details"].dump(2) << '\n';
  if (!s.pass()) {
    std::cerr << "failing inputs:\n" << j["failing_inputs"].dump(2) << '\n';
    return kExitFailed;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady stratified water waves: solve, certify and analyze symmetry"};
  app.require_subcommand(1);

  std::string input, out;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  struct Cmd {
    const char* name;
    const char* help;
    unsigned stages;
    bool honor;
  };
  const Cmd cmds[] = {
      {"solve", "laminar flow, continuation and diagnostics", stage_solve, true},
      {"certify", "solve, then the symmetry certificates", stage_solve | stage_certificates, false},
      {"eigen", "solve, then the eigen analysis of the reflected pair", stage_solve | stage_eigen,
       false},
      {"sweep", "solve, then the moving-plane sweep", stage_solve | stage_sweep, false},
      {"run", "full pipeline as toggled in the scenario",
       stage_solve | stage_certificates | stage_eigen | stage_sweep, true},
  };
  const Cmd* chosen = nullptr;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("scenario", input, "scenario file, or a directory of them")->required();
    sub->add_option("--out", out, "output directory (overrides the scenario)");
    sub->add_option("--jobs", jobs, "worker threads for a directory of scenarios")
        ->check(CLI::PositiveNumber);
    sub->callback([&chosen, &c] { chosen = &c; });
  }

  std::string suite;
  int trials = 100, size = 0;
  std::uint64_t seed = 0;
  auto* ver = app.add_subcommand("verify", "seeded property suite");
  ver->add_option("suite", suite, "eigen-props | perturbation | max-principle | bnv")
      ->required()
      ->check(CLI::IsMember({"eigen-props", "perturbation", "max-principle", "bnv"}));
  ver->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
  ver->add_option("--seed", seed, "random seed");
  ver->add_option("--size", size, "interior nodes per side (suite default when omitted)");

  std::string dir;
  auto* rep = app.add_subcommand("report", "summarize a report.json");
  rep->add_option("--dir", dir, "output directory of a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (ver->parsed()) return run_verify(suite, trials, seed, size);
  if (rep->parsed()) return print_report(dir);

  std::vector<Job> list;
  try {
    list = load_jobs(input, out);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return run_jobs(list, chosen->stages, chosen->honor, jobs);
}
