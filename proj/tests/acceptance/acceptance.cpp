// Runs every named preset through the C API and prints one verdict line per
// criterion, followed by its measured numbers. Exit status is nonzero if any
// criterion fails.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "oralab/oralab.h"

int main(int argc, char** argv) {
  unsigned threads = 1;
  if (const char* t = std::getenv("ORALAB_THREADS")) threads = static_cast<unsigned>(std::atoi(t));
  const std::size_t n = oralab_preset_count();
  int failed = 0;
  std::string summary;
  for (std::size_t i = 0; i < n; ++i) {
    int id = 0;
    const char* name = nullptr;
    oralab_preset_info(i, &id, &name, nullptr);
    // optional filter: acceptance <name-or-id>...
    if (argc > 1) {
      bool wanted = false;
      for (int a = 1; a < argc; ++a) {
        wanted = wanted || std::string(argv[a]) == name || std::string(argv[a]) == std::to_string(id);
      }
      if (!wanted) continue;
    }
    oralab_preset_result* r = nullptr;
    const oralab_status s = oralab_preset_run(name, threads, 0, &r);
    char line[256];
    if (s != ORALAB_OK) {
      std::snprintf(line, sizeof line, "criterion %2d %-17s FAIL (error: %s: %s)\n", id, name,
                    oralab_status_name(s), oralab_last_error());
      std::fputs(line, stdout);
      summary += line;
      ++failed;
      continue;
    }
    const bool ok = oralab_preset_result_passed(r) != 0;
    std::snprintf(line, sizeof line, "criterion %2d %-17s %s (%.1f s)\n", id, name,
                  ok ? "PASS" : "FAIL", oralab_preset_result_seconds(r));
    std::fputs(line, stdout);
    summary += line;
    for (std::size_t k = 0; k < oralab_preset_result_detail_count(r); ++k) {
      std::printf("    %s\n", oralab_preset_result_detail(r, k));
    }
    std::fflush(stdout);
    if (!ok) ++failed;
    oralab_preset_result_free(r);
  }
  std::printf("\nsummary\n%s%d failed\n", summary.c_str(), failed);
  return failed == 0 ? 0 : 1;
}
