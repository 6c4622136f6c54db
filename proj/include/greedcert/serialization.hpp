#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "greedcert/adversarial.hpp"
#include "greedcert/certificates.hpp"
#include "greedcert/experiments.hpp"
#include "greedcert/solvers.hpp"

namespace greedcert {

using Json = nlohmann::ordered_json;

// Atom indices are written 1-based everywhere in files.

/// Plain comma-separated numbers, one matrix row per line (atoms are
/// columns). Blank lines and lines starting with '#' are skipped.
Matrix read_matrix_csv(const std::filesystem::path& path);
Matrix parse_matrix_csv(const std::string& text);
/// Column vector from a CSV holding one value per line or a single row.
Vector read_vector_csv(const std::filesystem::path& path);
std::string format_matrix_csv(const Matrix& m);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

Json to_json(const RunTrace& trace);
Json to_json(const Verdict& verdict);
Json to_json(const CertificateReport& report);
Json to_json(const ConverseReport& report);
Json to_json(const ValidationReport& report);
Json to_json(const Lemma5Report& report);

/// Run parameters stored next to an experiment CSV.
Json experiment_manifest(Index k, const std::vector<double>& grid, Index trials, std::uint64_t seed,
                         const std::string& csv_name);

} // namespace greedcert
