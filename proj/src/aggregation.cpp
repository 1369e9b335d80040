#include "tailex/aggregation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "tailex/errors.hpp"
#include "tailex/parallel.hpp"

namespace tailex {

void WeightVector::validate(std::size_t max_row_len) const {
    if (z.size() < max_row_len)
        throw ConfigError("WeightVector: " + std::to_string(z.size()) +
                          " weights cannot cover rows of length " + std::to_string(max_row_len));
    for (double w : z)
        if (!(w > 0.0) || !std::isfinite(w))
            throw ConfigError("WeightVector: weights must be positive and finite");
}

WeightVector WeightVector::constant(double c, std::size_t count) {
    return WeightVector{std::vector<double>(count, c)};
}

namespace {

template <typename Loop>
AggregateSeries aggregate_impl(const SeriesMatrix& m, const WeightVector& z, bool include_q,
                               Loop&& loop) {
    const std::uint32_t longest =
        m.rows == 0 ? 0 : *std::max_element(m.row_len.begin(), m.row_len.end());
    z.validate(longest);
    if (include_q && !m.has_q())
        throw ConfigError("row_aggregate: include_q set but the matrix has no Q column");

    AggregateSeries out;
    out.sums.resize(m.rows);
    out.maxima.resize(m.rows);
    out.weights = z.z;
    out.source_fingerprint = m.fingerprint;

    loop(m.rows, [&](std::size_t r) {
        double sum = 0.0, mx = 0.0;
        const std::uint32_t len = m.row_len[r];
        for (std::uint32_t c = 0; c < len; ++c) {
            const double v = z.z[c] * m.at(r, c);
            sum += v;
            mx = std::max(mx, v);
        }
        if (include_q) {
            sum += m.q[r];
            mx = std::max(mx, m.q[r]);
        }
        out.sums[r] = sum;
        out.maxima[r] = mx;
    });
    return out;
}

}  // namespace

AggregateSeries row_aggregate(const SeriesMatrix& m, const WeightVector& z, bool include_q) {
    return aggregate_impl(m, z, include_q,
                          [](std::size_t n, auto&& body) { parallel_for(n, body); });
}

AggregateSeries row_aggregate_serial(const SeriesMatrix& m, const WeightVector& z,
                                     bool include_q) {
    return aggregate_impl(m, z, include_q,
                          [](std::size_t n, auto&& body) { serial_for(n, body); });
}

std::vector<double> running_maxima(const std::vector<double>& series) {
    if (series.empty()) throw std::domain_error("running_maxima: empty series");
    std::vector<double> out(series.size());
    double m = series.front();
    for (std::size_t i = 0; i < series.size(); ++i) {
        m = std::max(m, series[i]);
        out[i] = m;
    }
    return out;
}

double predicted_theta(const std::vector<double>& thetas, const std::vector<double>& zs,
                       double k1) {
    if (thetas.empty() || thetas.size() != zs.size())
        throw std::domain_error("predicted_theta: need equally sized nonempty theta/z lists");
    if (!(k1 > 0.0)) throw std::domain_error("predicted_theta: k1 must be positive");
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        if (!(thetas[j] >= 0.0) || !(thetas[j] <= 1.0))
            throw std::domain_error("predicted_theta: theta outside [0, 1]");
        if (!(zs[j] > 0.0)) throw std::domain_error("predicted_theta: weights must be positive");
        const double w = std::pow(zs[j], k1);
        num += thetas[j] * w;
        den += w;
    }
    return num / den;
}

double scenario_theta(const TailProfile& profile, ScenarioKind kind, const WeightVector& z) {
    profile.validate();
    const std::size_t d = profile.dominating_count();
    z.validate(d);
    switch (kind) {
        case ScenarioKind::independent: {
            std::vector<double> thetas(d), zs(z.z.begin(), z.z.begin() + d);
            for (std::size_t j = 0; j < d; ++j) thetas[j] = profile.per_column[j].theta;
            return predicted_theta(thetas, zs, profile.k1);
        }
        case ScenarioKind::identical:
        case ScenarioKind::cumulative:
            // One underlying series drives the whole dominating block, so the
            // aggregate inherits that series' extremal index.
            return profile.per_column.front().theta;
        case ScenarioKind::alternating:
            throw ConfigError("scenario_theta: the alternating scenario is nonstationary");
    }
    throw ConfigError("scenario_theta: unknown scenario");
}

const Condition11bCell& Condition11bReport::cell(double y, std::size_t n) const {
    for (const auto& c : cells)
        if (c.y == y && c.n == n) return c;
    throw std::out_of_range("Condition11bReport: no cell for requested (y, n)");
}

Condition11bReport check_condition_11b(const MatrixProvider& make_matrix,
                                       std::size_t replicates, const TailProfile& profile,
                                       const WeightVector& z, const std::vector<double>& y_grid,
                                       const std::vector<std::size_t>& n_grid) {
    profile.validate();
    const std::size_t d = profile.dominating_count();
    if (d < 2) throw ConfigError("check_condition_11b: need at least 2 dominating columns");
    if (replicates < 1 || y_grid.empty() || n_grid.empty())
        throw ConfigError("check_condition_11b: empty replicate or grid specification");
    if (!std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() < 1)
        throw ConfigError("check_condition_11b: n_grid must be ascending and positive");
    z.validate(d);

    const std::size_t cells = y_grid.size() * n_grid.size();
    // Indicator sums per replicate, reduced in index order afterwards.
    std::vector<std::uint8_t> lhs_hits(replicates * cells, 0);
    std::vector<std::uint8_t> rhs_hits(replicates * cells, 0);
    std::atomic<bool> undersized{false};

    parallel_for(replicates, [&](std::size_t rep) {
        const SeriesMatrix m = make_matrix(rep);
        if (m.rows < n_grid.back() || m.cols < d) {
            undersized = true;  // cannot throw across the parallel region
            return;
        }
        // Column maxima of the full series at each requested n.
        std::vector<double> col_max(d * n_grid.size());
        for (std::size_t j = 0; j < d; ++j) {
            double mx = 0.0;
            std::size_t next = 0, row = 0;
            for (; row < m.rows && next < n_grid.size(); ++row) {
                mx = std::max(mx, m.at(row, j));
                while (next < n_grid.size() && row + 1 == n_grid[next]) {
                    col_max[j * n_grid.size() + next] = mx;
                    ++next;
                }
            }
        }
        for (std::size_t yi = 0; yi < y_grid.size(); ++yi) {
            for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
                const double u =
                    threshold_u(n_grid[ni], ThresholdSequence{y_grid[yi], profile.k1});
                auto weighted = [&](std::size_t j) {
                    return z.z[j] * col_max[j * n_grid.size() + ni];
                };
                bool lhs = false;
                for (std::size_t j = 0; j + 1 < d && !lhs; ++j) {
                    if (weighted(j) <= u) continue;
                    bool rest_below = true;
                    for (std::size_t i = j + 1; i < d; ++i) rest_below &= weighted(i) <= u;
                    lhs = rest_below;  // events are disjoint across j
                }
                const std::size_t cell = yi * n_grid.size() + ni;
                lhs_hits[rep * cells + cell] = lhs ? 1 : 0;
                rhs_hits[rep * cells + cell] = weighted(d - 1) <= u ? 1 : 0;
            }
        }
    });
    if (undersized)
        throw ConfigError("check_condition_11b: replicate matrices must cover max(n_grid) rows "
                          "and all dominating columns");

    Condition11bReport report;
    report.replicates = replicates;
    report.dominating = d;
    report.cells.reserve(cells);
    for (std::size_t yi = 0; yi < y_grid.size(); ++yi) {
        for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
            const std::size_t cell = yi * n_grid.size() + ni;
            std::size_t lhs_count = 0, rhs_count = 0;
            for (std::size_t rep = 0; rep < replicates; ++rep) {
                lhs_count += lhs_hits[rep * cells + cell];
                rhs_count += rhs_hits[rep * cells + cell];
            }
            Condition11bCell out;
            out.y = y_grid[yi];
            out.n = n_grid[ni];
            out.lhs = static_cast<double>(lhs_count) / static_cast<double>(replicates);
            out.rhs = static_cast<double>(rhs_count) / static_cast<double>(replicates);
            out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
            out.half_width = 1.96 * std::sqrt(out.lhs * (1.0 - out.lhs) /
                                              static_cast<double>(replicates));
            out.wide_band = out.lhs > 0.0 && out.half_width > 0.5 * out.lhs;
            report.cells.push_back(out);
        }
    }
    return report;
}

namespace {
std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}
}  // namespace

void write_aggregates_csv(const AggregateSeries& s, const std::string& path,
                          const std::vector<std::pair<std::string, std::string>>& metadata) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << '\n';
    out << "# weights:";
    for (double w : s.weights) out << ' ' << format_double(w);
    out << "\n# fingerprint: " << s.source_fingerprint << '\n';
    out << "sum,max\n";
    for (std::size_t i = 0; i < s.sums.size(); ++i)
        out << format_double(s.sums[i]) << ',' << format_double(s.maxima[i]) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

AggregateSeries read_aggregates_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    AggregateSeries s;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            if (line.rfind("# fingerprint: ", 0) == 0)
                s.source_fingerprint = std::stoull(line.substr(15));
            continue;
        }
        if (!header_seen) {
            if (line != "sum,max") throw IoError("unexpected header in " + path);
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("malformed row in " + path);
        s.sums.push_back(std::stod(line.substr(0, comma)));
        s.maxima.push_back(std::stod(line.substr(comma + 1)));
    }
    if (!header_seen) throw IoError("missing header in " + path);
    return s;
}

}  // namespace tailex
