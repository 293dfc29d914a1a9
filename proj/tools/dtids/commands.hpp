#pragma once

#include "settings.hpp"

namespace dtids::cli {

// Every command writes its outputs and a manifest.txt into --out. Errors are
// thrown as dtids exceptions and mapped to exit codes by main.
void run_synth(Settings& s);
void run_prepare(Settings& s);
void run_train(Settings& s);
void run_evaluate(Settings& s);
void run_transfer(Settings& s);
void run_report(Settings& s);

/// Dispatches on s.command().
void run_command(Settings& s);

}  // namespace dtids::cli
