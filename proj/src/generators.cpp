#include "tailex/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "tailex/errors.hpp"
#include "tailex/parallel.hpp"

namespace tailex {

namespace {

double pareto_from_survival(double s, double tail_index, double scale) {
    return scale * std::pow(s, -1.0 / tail_index);
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

void RowLengthLaw::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ConfigError("RowLengthLaw: alpha must be positive");
    if (min < 1) throw ConfigError("RowLengthLaw: min must be >= 1");
    if (cap != 0 && cap < min) throw ConfigError("RowLengthLaw: cap below min");
}

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::independent: return "independent";
        case ScenarioKind::identical: return "identical";
        case ScenarioKind::cumulative: return "cumulative";
        case ScenarioKind::alternating: return "alternating";
    }
    return "unknown";
}

ScenarioKind scenario_from_string(const std::string& name) {
    if (name == "independent") return ScenarioKind::independent;
    if (name == "identical") return ScenarioKind::identical;
    if (name == "cumulative") return ScenarioKind::cumulative;
    if (name == "alternating") return ScenarioKind::alternating;
    throw ConfigError("unknown scenario kind: " + name);
}

std::size_t DominatingCountLaw::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

std::size_t DominatingCountLaw::sample(Rng& rng) const {
    if (is_fixed()) return values.front();
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        acc += probs[i];
        if (u < acc) return values[i];
    }
    return values.back();
}

void DominatingCountLaw::validate(std::size_t column_budget) const {
    if (values.empty() || values.size() != probs.size())
        throw ConfigError("DominatingCountLaw: values/probs size mismatch");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw ConfigError("DominatingCountLaw: negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("DominatingCountLaw: probabilities must sum to 1");
    for (std::size_t v : values) {
        if (v < 1) throw ConfigError("DominatingCountLaw: d must be >= 1");
        if (v >= column_budget)
            throw ConfigError("DominatingCountLaw: d must stay below the column count");
    }
}

double SeriesMatrix::column_max(std::size_t c, std::size_t n) const {
    double m = 0.0;
    for (std::size_t r = 0; r < n; ++r) m = std::max(m, at(r, c));
    return m;
}

std::vector<double> gen_iid_column(std::size_t n, const ParetoLaw& law, std::uint64_t seed) {
    if (n < 1) throw std::domain_error("gen_iid_column: n must be >= 1");
    law.validate();
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = pareto_from_survival(1.0 - rng.uniform01(), law.tail_index, law.scale);
    return out;
}

std::vector<double> gen_armax_column(std::size_t n, double tail_index, double theta,
                                     std::uint64_t seed, double scale, std::size_t burn_in) {
    if (n < 1) throw std::domain_error("gen_armax_column: n must be >= 1");
    if (!(theta > 0.0) || !(theta <= 1.0))
        throw std::domain_error("gen_armax_column: theta must lie in (0, 1], got " +
                                std::to_string(theta));
    ParetoLaw law{tail_index, scale};
    law.validate();

    Rng rng(seed);
    const double memory = 1.0 - theta;
    auto frechet = [&rng] { return -1.0 / std::log(rng.uniform_open()); };

    double x = frechet();
    for (std::size_t i = 0; i < burn_in; ++i) x = std::max(memory * x, theta * frechet());

    std::vector<double> out(n);
    for (double& v : out) {
        x = std::max(memory * x, theta * frechet());
        // Survival of the standard Frechet state, computed as -expm1 to keep
        // precision deep in the tail, then mapped onto Pareto(k).
        v = pareto_from_survival(-std::expm1(-1.0 / x), tail_index, scale);
    }
    return out;
}

std::vector<std::uint32_t> gen_row_lengths(std::size_t n_rows, const RowLengthLaw& law,
                                           std::uint64_t seed) {
    law.validate();
    Rng rng(seed);
    std::vector<std::uint32_t> out(n_rows);
    const double inv_alpha = 1.0 / law.alpha;
    for (auto& len : out) {
        const double u = 1.0 - rng.uniform01();  // (0, 1]
        double v = std::ceil(std::pow(u, -inv_alpha));
        if (v < static_cast<double>(law.min)) v = static_cast<double>(law.min);
        if (law.cap != 0 && v > static_cast<double>(law.cap)) v = static_cast<double>(law.cap);
        len = static_cast<std::uint32_t>(v);
    }
    return out;
}

DominationCheck check_domination(double k1, double alpha, double chi) {
    if (!(k1 > 0.0) || !(alpha > 0.0) || !(chi > 0.0))
        throw std::domain_error("check_domination: k1, alpha, chi must be positive");
    DominationCheck res;
    res.row_tail_exponent = chi * alpha;
    res.exceedance_exponent = 1.0;
    res.margin = res.row_tail_exponent - 1.0;
    res.pass = res.row_tail_exponent > 1.0;  // strict: o(.) needs genuine excess
    return res;
}

SeriesMatrix gen_matrix(const TailProfile& profile, ScenarioKind kind, std::size_t n_rows,
                        const RowLengthLaw& law, std::uint64_t seed,
                        const RowLengthHook& coupling) {
    profile.validate();
    if (n_rows < 1) throw std::domain_error("gen_matrix: need at least one row");
    const std::size_t cols = profile.per_column.size();
    const std::size_t d = profile.dominating_count();
    if (kind == ScenarioKind::cumulative && d < 2)
        throw ConfigError("cumulative scenario needs at least 2 dominating columns");

    SeriesMatrix m;
    m.rows = n_rows;
    m.cols = cols;
    m.values.assign(n_rows * cols, 0.0);
    m.fingerprint = derive_seed(seed, {n_rows, cols, static_cast<std::uint64_t>(kind)});

    // Aliased columns of the identical scenario are filled by the post-pass.
    auto generated = [&](std::size_t c) {
        return !(kind == ScenarioKind::identical && c >= 1 && c < d);
    };
    parallel_for(cols, [&](std::size_t c) {
        if (!generated(c)) return;
        const auto& colspec = profile.per_column[c];
        auto series = gen_armax_column(n_rows, colspec.tail_index, colspec.theta,
                                       derive_seed(seed, {stream::kColumn, c}));
        for (std::size_t r = 0; r < n_rows; ++r) m.values[r * cols + c] = series[r];
    });

    switch (kind) {
        case ScenarioKind::independent:
            break;
        case ScenarioKind::identical:
            for (std::size_t c = 1; c < d; ++c)
                for (std::size_t r = 0; r < n_rows; ++r) m.at(r, c) = m.at(r, 0);
            break;
        case ScenarioKind::cumulative:
            for (std::size_t c = 1; c < d; ++c)
                for (std::size_t r = 0; r < n_rows; ++r) {
                    double sum = 0.0;
                    for (std::size_t j = 0; j < c; ++j) sum += m.at(r, j);
                    m.at(r, c) = sum;
                }
            break;
        case ScenarioKind::alternating:
            // 1-based odd rows carry one shared dominating value.
            for (std::size_t r = 0; r < n_rows; r += 2)
                for (std::size_t c = 1; c < d; ++c) m.at(r, c) = m.at(r, 0);
            break;
    }

    RowLengthLaw capped = law;
    capped.cap = capped.cap == 0 ? cols : std::min(capped.cap, cols);
    if (coupling) {
        m.row_len = coupling(m, derive_seed(seed, {stream::kRowLength}));
        if (m.row_len.size() != n_rows)
            throw ConfigError("row-length coupling returned wrong number of rows");
        for (auto& len : m.row_len)
            len = std::min<std::uint32_t>(std::max<std::uint32_t>(len, 1),
                                          static_cast<std::uint32_t>(cols));
    } else {
        m.row_len = gen_row_lengths(n_rows, capped, derive_seed(seed, {stream::kRowLength}));
    }
    return m;
}

void PersonalizationLaw::validate(double k1) const {
    switch (kind) {
        case Kind::none:
            return;
        case Kind::uniform:
            if (!(damping > 0.0) || !(damping < 1.0))
                throw ConfigError("PersonalizationLaw: damping must lie in (0, 1)");
            return;
        case Kind::pareto:
            if (!(beta > k1))
                throw ConfigError(
                    "PersonalizationLaw: beta must exceed k1 so the personalization "
                    "column never dominates");
            if (!(scale > 0.0)) throw ConfigError("PersonalizationLaw: scale must be positive");
            return;
    }
}

std::vector<double> gen_q_column(std::size_t rows, const PersonalizationLaw& law,
                                 std::uint64_t seed) {
    switch (law.kind) {
        case PersonalizationLaw::Kind::none:
            return {};
        case PersonalizationLaw::Kind::uniform:
            return std::vector<double>(rows, (1.0 - law.damping) / static_cast<double>(rows));
        case PersonalizationLaw::Kind::pareto:
            return gen_iid_column(rows, ParetoLaw{law.beta, law.scale}, seed);
    }
    return {};
}

void write_matrix_csv(const SeriesMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "row,column,value\n";
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.row_len[r]; ++c)
            out << (r + 1) << ',' << (c + 1) << ',' << format_double(m.at(r, c)) << '\n';
        if (m.has_q()) out << (r + 1) << ",0," << format_double(m.q[r]) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

namespace {
constexpr char kMagic[4] = {'T', 'L', 'X', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_raw(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
}
}  // namespace

void write_matrix_binary(const SeriesMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(kMagic, 4);
    write_raw(out, kVersion);
    write_raw(out, static_cast<std::uint64_t>(m.rows));
    write_raw(out, static_cast<std::uint64_t>(m.cols));
    write_raw(out, m.fingerprint);
    const std::uint8_t has_q = m.has_q() ? 1 : 0;
    write_raw(out, has_q);
    out.write(reinterpret_cast<const char*>(m.row_len.data()),
              static_cast<std::streamsize>(m.row_len.size() * sizeof(std::uint32_t)));
    for (std::size_t r = 0; r < m.rows; ++r)
        out.write(reinterpret_cast<const char*>(&m.values[r * m.cols]),
                  static_cast<std::streamsize>(m.row_len[r] * sizeof(double)));
    if (has_q)
        out.write(reinterpret_cast<const char*>(m.q.data()),
                  static_cast<std::streamsize>(m.q.size() * sizeof(double)));
    if (!out) throw IoError("write failed: " + path);
}

SeriesMatrix read_matrix_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("not a matrix file: " + path);
    std::uint32_t version = 0;
    read_raw(in, version);
    if (version != kVersion) throw IoError("unsupported matrix file version");
    std::uint64_t rows = 0, cols = 0;
    read_raw(in, rows);
    read_raw(in, cols);
    SeriesMatrix m;
    m.rows = rows;
    m.cols = cols;
    read_raw(in, m.fingerprint);
    std::uint8_t has_q = 0;
    read_raw(in, has_q);
    m.row_len.resize(rows);
    in.read(reinterpret_cast<char*>(m.row_len.data()),
            static_cast<std::streamsize>(rows * sizeof(std::uint32_t)));
    m.values.assign(rows * cols, 0.0);  // inactive cells come back as zeros
    for (std::uint64_t r = 0; r < rows; ++r)
        in.read(reinterpret_cast<char*>(&m.values[r * cols]),
                static_cast<std::streamsize>(m.row_len[r] * sizeof(double)));
    if (has_q) {
        m.q.resize(rows);
        in.read(reinterpret_cast<char*>(m.q.data()),
                static_cast<std::streamsize>(rows * sizeof(double)));
    }
    if (!in) throw IoError("truncated matrix file: " + path);
    return m;
}

}  // namespace tailex
