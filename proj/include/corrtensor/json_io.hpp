#ifndef CORRTENSOR_JSON_IO_HPP
#define CORRTENSOR_JSON_IO_HPP

#include <string>

#include "corrtensor/harness.hpp"
#include "corrtensor/prob.hpp"

namespace corrtensor {

struct FileError : ProbError { using ProbError::ProbError; };
struct ParseError : ProbError { using ProbError::ProbError; };

/// {"cardinalities": [...], "probabilities": [...], "labels": [...]}
JointDistribution load_distribution(const std::string& path);
void save_distribution(const JointDistribution& dist, const std::string& path);

/// {"input_cardinalities": [...], "output_cardinalities": [...], "kernel": [[...], ...]}
Channel load_channel(const std::string& path);
void save_channel(const Channel& channel, const std::string& path);

std::string report_to_json(const PropertyReport& report);
void save_report(const PropertyReport& report, const std::string& path);

/// Shortest representation that round-trips (17 significant digits), '.'
/// decimal, no locale.
std::string format_double(double value);

}  // namespace corrtensor

#endif
