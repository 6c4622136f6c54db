#include "greedcert/serialization.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace greedcert {

namespace {

Json one_based(const IndexSet& s) {
    Json out = Json::array();
    for (Index i : s) out.push_back(i + 1);
    return out;
}

Json scores(const std::map<Index, double>& correlations) {
    Json out = Json::object();
    for (auto [i, c] : correlations) out[std::to_string(i + 1)] = c;
    return out;
}

Json number_or_null(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

double parse_number(const std::string& token, Index line) {
    const char* begin = token.c_str();
    while (*begin == ' ' || *begin == '\t') ++begin;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
    if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw Error(ErrorCode::IoError, "line " + std::to_string(line) + ": cannot parse '" + token + "' as a number");
    return v;
}

} // namespace

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

Matrix parse_matrix_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
            continue;
        std::vector<double> row;
        std::istringstream fields(line);
        std::string token;
        while (std::getline(fields, token, ',')) row.push_back(parse_number(token, line_no));
        if (!line.empty() && line.back() == ',') throw Error(ErrorCode::IoError, "line " + std::to_string(line_no) + ": trailing comma");
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error(ErrorCode::IoError, "line " + std::to_string(line_no) + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::IoError, "empty matrix");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

Matrix read_matrix_csv(const std::filesystem::path& path) { return parse_matrix_csv(read_text(path)); }

Vector read_vector_csv(const std::filesystem::path& path) {
    const Matrix m = read_matrix_csv(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw Error(ErrorCode::IoError, path.string() + ": expected a single row or column");
}

std::string format_matrix_csv(const Matrix& m) {
    std::string out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += Json(m(r, c)).dump();
        }
        out += '\n';
    }
    return out;
}

Json to_json(const RunTrace& trace) {
    Json steps = Json::array();
    for (const auto& s : trace.steps) {
        steps.push_back({{"g", s.iteration},
                         {"selected", s.selected + 1},
                         {"tie_set", one_based(s.tie_set)},
                         {"residual_norm", s.residual_norm},
                         {"scores", scores(s.correlations)}});
    }
    return {{"variant", to_string(trace.variant)},
            {"initial_active_set", one_based(trace.initial_active_set)},
            {"initial_residual_norm", trace.initial_residual_norm},
            {"steps", steps},
            {"selected", one_based(trace.selected())},
            {"stop_reason", to_string(trace.stop_reason)}};
}

Json to_json(const Verdict& v) {
    Json out = {{"applicable", v.applicable},
                {"pass", v.pass},
                {"binding_index", v.binding_index ? Json(*v.binding_index) : Json(nullptr)},
                {"mu_star", number_or_null(v.mu_star)},
                {"boundary", v.boundary},
                {"margins", v.margins}};
    if (v.branch != 0) out["branch"] = v.branch;
    if (!v.reason.empty()) out["reason"] = v.reason;
    return out;
}

Json to_json(const CertificateReport& report) {
    Json verdicts = Json::object();
    for (const auto& [id, v] : report.verdicts) verdicts[id] = to_json(v);
    const auto& q = report.quantities;
    return {{"k", report.k},
            {"mu", report.mu},
            {"variant", to_string(report.variant)},
            {"verdicts", verdicts},
            {"quantities",
             {{"alpha_g", q.alpha},
              {"mu_g", q.mu_g},
              {"gamma_k", number_or_null(q.gamma_k)},
              {"mu_i_star", q.mu_i_star},
              {"rho", number_or_null(q.rho)}}}};
}

Json to_json(const ConverseReport& report) {
    Json steps = Json::array();
    for (const auto& s : report.steps) {
        Json signs = Json::object();
        for (auto [i, c] : s.correlations) signs[std::to_string(i + 1)] = c > 0 ? 1 : (c < 0 ? -1 : 0);
        steps.push_back({{"g", s.g},
                         {"active_set", one_based(s.active_set)},
                         {"tie_set", one_based(s.tie_set)},
                         {"scores", scores(s.correlations)},
                         {"signs", signs}});
    }
    Json out = {{"mode", report.mode},
                {"k", report.k},
                {"mu", report.mu},
                {"j", report.j ? Json(*report.j) : Json(nullptr)},
                {"slack", number_or_null(report.slack)},
                {"variant", to_string(report.variant)},
                {"coefficients", std::vector<double>(report.coefficients.begin(), report.coefficients.end())},
                {"steps", steps},
                {"max_lemma5_deviation", report.max_lemma5_deviation},
                {"max_tie_gap", report.max_tie_gap},
                {"verdict", report.verdict},
                {"failures", report.failures}};
    if (report.certificate) out["certificate"] = to_json(*report.certificate);
    return out;
}

Json to_json(const ValidationReport& report) {
    const auto& s = report.spec;
    return {{"theorem", s.theorem},
            {"k", s.k},
            {"mu", s.mu},
            {"variant", to_string(s.variant)},
            {"dictionary", s.dictionary == DictionaryKind::Adversarial ? "adversarial" : "random"},
            {"seed", s.seed},
            {"trials", s.trials},
            {"certified", report.certified},
            {"failures", report.failures},
            {"rejected", report.rejected},
            {"infeasible", report.infeasible},
            {"details", report.failure_details}};
}

Json to_json(const Lemma5Report& report) {
    return {{"g", report.g},
            {"variant", to_string(report.variant)},
            {"alpha_g", report.alpha},
            {"mu_g", report.mu_g},
            {"max_diagonal_deviation", report.max_diagonal_deviation},
            {"max_offdiagonal_deviation", report.max_offdiagonal_deviation}};
}

Json experiment_manifest(Index k, const std::vector<double>& grid, Index trials, std::uint64_t seed,
                         const std::string& csv_name) {
    Json families = Json::array();
    for (Family f : kAllFamilies) families.push_back(to_string(f));
    return {{"csv", csv_name},
            {"k", k},
            {"trials", trials},
            {"seed", seed},
            {"k_mu_grid", grid},
            {"distributions", families},
            {"parameters",
             {{"bernoulli", "+-1 equiprobable"},
              {"uniform", "[-1, 1]"},
              {"normal", "mean 0, std 1"},
              {"laplacian", "location 0, scale 1"},
              {"loglogistic", "scale 1, shape 1, random sign"}}}};
}

} // namespace greedcert
