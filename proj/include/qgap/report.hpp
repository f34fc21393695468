#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "qgap/errors.hpp"
#include "qgap/operators.hpp"

#include "json.hpp"

namespace qgap {

struct ClassicalEntry {
    double value = 0.0;
    bool integer_arithmetic = false;
    std::uint64_t budget = 0;
};

struct SeesawEntry {
    double value = 0.0;
    std::size_t local_dim = 2;
    int restarts = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    bool converged = false;
};

struct NpaEntry {
    double value = 0.0;
    double error_bar = 0.0;
    int level = 0;
    double tol = 0.0;
    std::string status;
};

struct ThetaEntry {
    double value = 0.0;
    double error_bar = 0.0;
};

struct SequentialEntry {
    double value = 0.0;
    double commutation_max = 0.0;
    std::string model_hash;
};

// The central comparison document: one operator, up to five engines, gap
// verdicts, and enough provenance to rerun any number in it.
struct BoundReport {
    std::string operator_id;
    double algebraic_max = 0.0;
    std::optional<ClassicalEntry> classical;
    std::optional<SeesawEntry> seesaw;
    std::optional<NpaEntry> npa;
    std::optional<ThetaEntry> theta;
    std::optional<SequentialEntry> sequential;
    std::optional<bool> tensor_vs_sequential;        // sequential beats tensor upper bound
    std::optional<bool> quantum_vs_classical_tensor; // tensor lower bound beats classical
    bool incomplete = false;
    std::string incomplete_reason;
};

inline void compute_gap_flags(BoundReport& r) {
    r.tensor_vs_sequential.reset();
    r.quantum_vs_classical_tensor.reset();
    if (r.sequential && r.npa)
        r.tensor_vs_sequential =
            r.sequential->value > r.npa->value + r.npa->error_bar + 1e-3;
    if (r.seesaw && r.classical)
        r.quantum_vs_classical_tensor = r.seesaw->value > r.classical->value + 1e-6;
}

inline void validate_report(const BoundReport& r) {
    if (r.operator_id.empty()) throw ContractError("report: missing operator id");
    if (r.classical && r.seesaw && r.classical->value > r.seesaw->value + 1e-6)
        throw ContractError("report invariant breach: classical exceeds seesaw");
    if (r.seesaw && r.npa &&
        r.seesaw->value > r.npa->value + r.npa->error_bar)
        throw ContractError("report invariant breach: seesaw exceeds npa bound");
    if (r.sequential && r.sequential->value > r.algebraic_max + 1e-6)
        throw ContractError("report invariant breach: sequential exceeds algebraic maximum");
    if (r.classical && r.classical->value > r.algebraic_max + 1e-6)
        throw ContractError("report invariant breach: classical exceeds algebraic maximum");
}

inline nlohmann::json report_to_json(const BoundReport& r) {
    nlohmann::json j;
    j["format"] = "qgap-report-v1";
    j["operator_id"] = r.operator_id;
    j["algebraic_max"] = r.algebraic_max;
    if (r.classical)
        j["classical"] = {{"value", r.classical->value},
                          {"integer_arithmetic", r.classical->integer_arithmetic},
                          {"budget", r.classical->budget},
                          {"engine", "enumeration"}};
    if (r.seesaw)
        j["seesaw"] = {{"value", r.seesaw->value},
                       {"local_dim", r.seesaw->local_dim},
                       {"restarts", r.seesaw->restarts},
                       {"seed", r.seesaw->seed},
                       {"tol", r.seesaw->tol},
                       {"converged", r.seesaw->converged},
                       {"engine", "seesaw"}};
    if (r.npa)
        j["npa"] = {{"value", r.npa->value},
                    {"error_bar", r.npa->error_bar},
                    {"level", r.npa->level},
                    {"tol", r.npa->tol},
                    {"status", r.npa->status},
                    {"engine", "moment-sdp"}};
    if (r.theta)
        j["theta"] = {{"value", r.theta->value},
                      {"error_bar", r.theta->error_bar},
                      {"engine", "lovasz-sdp"}};
    if (r.sequential)
        j["sequential"] = {{"value", r.sequential->value},
                           {"commutation_max", r.sequential->commutation_max},
                           {"model_hash", r.sequential->model_hash},
                           {"engine", "construction"}};
    nlohmann::json flags = nlohmann::json::object();
    if (r.tensor_vs_sequential) flags["tensor_vs_sequential"] = *r.tensor_vs_sequential;
    if (r.quantum_vs_classical_tensor)
        flags["quantum_vs_classical_tensor"] = *r.quantum_vs_classical_tensor;
    j["gap_flags"] = std::move(flags);
    if (r.incomplete) {
        j["incomplete"] = true;
        j["incomplete_reason"] = r.incomplete_reason;
    }
    return j;
}

inline std::string serialize_report(const BoundReport& r) {
    return report_to_json(r).dump(2) + "\n";
}

inline BoundReport report_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "qgap-report-v1")
            throw ParseError("report: unknown format tag");
        BoundReport r;
        r.operator_id = j.at("operator_id").get<std::string>();
        r.algebraic_max = j.at("algebraic_max").get<double>();
        if (j.contains("classical")) {
            ClassicalEntry e;
            e.value = j["classical"].at("value").get<double>();
            e.integer_arithmetic = j["classical"].at("integer_arithmetic").get<bool>();
            e.budget = j["classical"].at("budget").get<std::uint64_t>();
            r.classical = e;
        }
        if (j.contains("seesaw")) {
            SeesawEntry e;
            e.value = j["seesaw"].at("value").get<double>();
            e.local_dim = j["seesaw"].at("local_dim").get<std::size_t>();
            e.restarts = j["seesaw"].at("restarts").get<int>();
            e.seed = j["seesaw"].at("seed").get<std::uint64_t>();
            e.tol = j["seesaw"].at("tol").get<double>();
            e.converged = j["seesaw"].at("converged").get<bool>();
            r.seesaw = e;
        }
        if (j.contains("npa")) {
            NpaEntry e;
            e.value = j["npa"].at("value").get<double>();
            e.error_bar = j["npa"].at("error_bar").get<double>();
            e.level = j["npa"].at("level").get<int>();
            e.tol = j["npa"].at("tol").get<double>();
            e.status = j["npa"].at("status").get<std::string>();
            r.npa = e;
        }
        if (j.contains("theta")) {
            ThetaEntry e;
            e.value = j["theta"].at("value").get<double>();
            e.error_bar = j["theta"].at("error_bar").get<double>();
            r.theta = e;
        }
        if (j.contains("sequential")) {
            SequentialEntry e;
            e.value = j["sequential"].at("value").get<double>();
            e.commutation_max = j["sequential"].at("commutation_max").get<double>();
            e.model_hash = j["sequential"].at("model_hash").get<std::string>();
            r.sequential = e;
        }
        const auto& flags = j.at("gap_flags");
        if (flags.contains("tensor_vs_sequential"))
            r.tensor_vs_sequential = flags["tensor_vs_sequential"].get<bool>();
        if (flags.contains("quantum_vs_classical_tensor"))
            r.quantum_vs_classical_tensor = flags["quantum_vs_classical_tensor"].get<bool>();
        if (j.contains("incomplete")) {
            r.incomplete = j["incomplete"].get<bool>();
            r.incomplete_reason = j.value("incomplete_reason", std::string{});
        }
        validate_report(r);
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report document: ") + e.what());
    }
}

inline BoundReport parse_report(const std::string& text) {
    try {
        return report_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report document: ") + e.what());
    }
}

}  // namespace qgap
