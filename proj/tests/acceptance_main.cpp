// Acceptance runner: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes or every failing one is listed
// with --known-red, 1 otherwise, 2 on bad arguments.
#include "hitchin/acceptance.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
  CLI::App app{"hitchin acceptance"};
  std::vector<int> only, known_red;
  std::string cache_dir;
  if (const char* env = std::getenv("HITCHIN_CACHE_DIR")) cache_dir = env;
  app.add_option("--only", only, "criterion ids to run (default: all)")->check(CLI::Range(1, 12));
  app.add_option("--known-red", known_red, "failing criteria that do not affect the exit status")
      ->check(CLI::Range(1, 12));
  app.add_option("--cache-dir", cache_dir, "psi table cache directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const hitchin::PainleveTable table = hitchin::load_or_solve(cache_dir);
  const auto results = hitchin::run_acceptance(table, only);
  int unexpected = 0;
  for (const auto& r : results) {
    const bool tolerated =
        std::find(known_red.begin(), known_red.end(), r.id) != known_red.end();
    std::printf("%s%s\n", r.line().c_str(), (!r.pass && tolerated) ? " (known red)" : "");
    if (!r.pass && !tolerated) ++unexpected;
  }
  std::printf("%zu criteria, %d unexpected failures\n", results.size(), unexpected);
  return unexpected == 0 ? 0 : 1;
}
