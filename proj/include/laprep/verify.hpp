// Self-check suite: runs every module's invariants and properties with
// randomized inputs and prints one pass/fail line per property.
#pragma once

#include <string>
#include <vector>

namespace laprep::bench {

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail; // worst margin or failure description
};

std::vector<PropertyResult> run_property_suite(bool fast);

// Prints the suite results; returns the number of failures (exit status).
int verify(bool fast);

}  // namespace laprep::bench
