// runner.hpp
// Orchestration of one simulation run: ensembles over the measurement
// grid, subensemble estimates against the closed-form values, and the
// three output files (events.csv, observables.csv, summary.txt).

#pragma once

#include <ostream>
#include <string>

#include "kaonsim/config.hpp"

namespace kaonsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitIoError = 3;

struct RunArtifacts {
    std::string observables_csv;
    std::string summary_txt;
    bool self_checks_passed = true;
};

// Run the configured protocol. Event rows stream to events_csv; the other
// two files are returned. Throws only on programming errors; statistical
// self-check results land in the summary.
RunArtifacts execute_run(const RunConfig& cfg, std::ostream& events_csv);

// CLI behavior for the run modes: creates the output directory (refusing
// to reuse an existing one unless force is set) and writes the files.
// Returns a process exit code; problems are described on err.
int run_and_write(const RunConfig& cfg, std::ostream& err);

// One EventRecord as a CSV row (no trailing newline).
std::string event_csv_row(const EventRecord& e);

inline constexpr const char* kEventsCsvHeader =
    "run_index,outcome,retained,b_result,d_result,t_m";

}  // namespace kaonsim
