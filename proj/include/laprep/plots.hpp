// Renders the five sweep figures as SVG files using a small built-in
// vector-graphics writer (no plotting dependency).
#pragma once

#include <string>

namespace laprep::bench {

// Reads a results CSV and writes into out_dir:
//   err-vs-walls.svg          exact and GDO error curves vs w
//   lambda2-vs-walls.svg      lambda_2 vs w, log y
//   err-vs-k.svg              error vs k, log y
//   err-gdo-vs-lambda2.svg    GDO error against lambda_2
//   err-exact-vs-lambda2.svg  exact-basis error against lambda_2
// Curves are per-w (or per-k) means over seeds with min/max bands.
void render_plots(const std::string& csv_path, const std::string& out_dir);

}  // namespace laprep::bench
