#include "corrtensor/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace corrtensor {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw FileError("failed writing " + path);
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

JointDistribution load_distribution(const std::string& path) {
    json j = read_json(path);
    try {
        std::vector<int> cards = j.at("cardinalities").get<std::vector<int>>();
        std::vector<double> probs = j.at("probabilities").get<std::vector<double>>();
        std::vector<std::string> labels;
        if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
        return JointDistribution(std::move(cards), std::move(probs), std::move(labels));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_distribution(const JointDistribution& dist, const std::string& path) {
    json j;
    j["cardinalities"] = dist.cardinalities();
    j["probabilities"] = dist.probabilities();
    if (!dist.labels().empty()) j["labels"] = dist.labels();
    write_text(path, j.dump(2) + "\n");
}

Channel load_channel(const std::string& path) {
    json j = read_json(path);
    try {
        return Channel(j.at("input_cardinalities").get<std::vector<int>>(),
                       j.at("output_cardinalities").get<std::vector<int>>(),
                       j.at("kernel").get<std::vector<std::vector<double>>>());
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_channel(const Channel& channel, const std::string& path) {
    json j;
    j["input_cardinalities"] = channel.input_cardinalities();
    j["output_cardinalities"] = channel.output_cardinalities();
    j["kernel"] = channel.kernel();
    write_text(path, j.dump(2) + "\n");
}

std::string report_to_json(const PropertyReport& report) {
    json j;
    j["version"] = report.version;
    j["measure"] = report.measure;
    j["property"] = report.property;
    j["oracle_mode"] = report.oracle_mode;
    j["tolerance"] = report.tolerance;
    j["seed"] = report.seed;
    j["max_violation"] = report.max_violation;
    j["passed"] = report.passed;
    json samples = json::array();
    for (const SampleRecord& s : report.samples) {
        json e;
        e["lambda"] = s.lambda;
        e["value_base"] = s.value_base;
        e["value_other"] = s.value_other;
        e["verdict_base"] = s.verdict_base;
        e["verdict_other"] = s.verdict_other;
        e["excluded"] = s.excluded;
        e["violation"] = s.violation;
        samples.push_back(std::move(e));
    }
    j["samples"] = std::move(samples);
    return j.dump(2) + "\n";
}

void save_report(const PropertyReport& report, const std::string& path) {
    write_text(path, report_to_json(report));
}

}  // namespace corrtensor
