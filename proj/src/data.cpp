#include <ssvm/data.hpp>
#include <ssvm/subsolvers.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace ssvm {
namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out)
{
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

double map_label(double raw, std::size_t line_no)
{
    if (raw == 1.0) return 1.0;
    if (raw == -1.0 || raw == 0.0) return -1.0;
    throw data_error("invalid label " + std::to_string(raw) + " on line " + std::to_string(line_no));
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

Dataset::Dataset(Matrix X, Vector y) : X_(std::move(X)), y_(std::move(y))
{
    if (X_.rows() < 1 || X_.cols() < 1) throw data_error("dataset needs n >= 1 and p >= 1");
    if (y_.size() != X_.rows()) throw data_error("label count does not match the number of rows");
    for (Index i = 0; i < y_.size(); ++i) {
        if (y_[i] != 1.0 && y_[i] != -1.0) throw data_error("invalid label: every label must be -1 or +1");
    }
    if (!X_.allFinite()) throw data_error("feature matrix contains non-finite values");
}

BlockPartition::BlockPartition(std::vector<Index> boundaries) : boundaries_(std::move(boundaries))
{
    if (boundaries_.size() < 2 || boundaries_.front() != 0) {
        throw std::invalid_argument("partition boundaries must start at 0 and define at least one block");
    }
    for (std::size_t g = 0; g + 1 < boundaries_.size(); ++g) {
        if (boundaries_[g + 1] <= boundaries_[g]) {
            throw std::invalid_argument("partition boundaries must be strictly increasing");
        }
    }
}

BlockPartition make_partition(Index p, Index G)
{
    if (G < 1 || G > p) {
        throw std::invalid_argument("block count must satisfy 1 <= G <= p (G=" + std::to_string(G) +
                                    ", p=" + std::to_string(p) + ")");
    }
    const Index base = p / G;
    const Index extra = p % G;
    std::vector<Index> b(G + 1, 0);
    for (Index g = 0; g < G; ++g) b[g + 1] = b[g] + base + (g < extra ? 1 : 0);
    return BlockPartition(std::move(b));
}

SignedDesign::SignedDesign(const Dataset& data, BlockPartition partition)
    : a0_(data.y()), partition_(std::move(partition)), spectral_(std::make_shared<SpectralCache>())
{
    if (partition_.total() != data.p()) {
        throw std::invalid_argument("partition spans " + std::to_string(partition_.total()) +
                                    " columns but the dataset has " + std::to_string(data.p()));
    }
    const Index G = partition_.blocks();
    blocks_.reserve(G);
    col_sq_norms_.reserve(G);
    for (Index g = 0; g < G; ++g) {
        Matrix Ag = data.y().asDiagonal() * data.X().middleCols(partition_.begin(g), partition_.size(g));
        col_sq_norms_.push_back(Ag.colwise().squaredNorm().transpose());
        blocks_.push_back(std::move(Ag));
    }
}

double SignedDesign::block_spectral(Index g) const
{
    std::call_once(spectral_->once, [this] {
        spectral_->values.resize(blocks_.size());
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            spectral_->values[b] = largest_gram_eigenvalue(blocks_[b]);
        }
    });
    return spectral_->values[g];
}

Vector SignedDesign::margins(double beta0, const Vector& beta_plus) const
{
    if (beta_plus.size() != p()) throw std::invalid_argument("coefficient length does not match the design");
    Vector m = a0_ * beta0;
    for (Index g = 0; g < blocks(); ++g) {
        const auto seg = beta_plus.segment(partition_.begin(g), partition_.size(g));
        for (Index j = 0; j < seg.size(); ++j) {
            if (seg[j] != 0.0) m.noalias() += seg[j] * blocks_[g].col(j);
        }
    }
    return m;
}

Matrix SignedDesign::unsigned_features() const
{
    Matrix X(n(), p());
    for (Index g = 0; g < blocks(); ++g) {
        X.middleCols(partition_.begin(g), partition_.size(g)) = a0_.asDiagonal() * blocks_[g];
    }
    return X;
}

SignedDesign build_signed_design(const Dataset& data, const BlockPartition& partition)
{
    return SignedDesign(data, partition);
}

PenaltyWeights::PenaltyWeights(Vector alpha) : alpha_(std::move(alpha))
{
    if (!alpha_.allFinite() || (alpha_.array() < 0.0).any()) {
        throw std::invalid_argument("penalty weights must be finite and non-negative");
    }
}

void SolverConfig::validate() const
{
    if (!(phi > 0.0)) throw std::invalid_argument("phi must be positive");
    if (!(theta > 0.0 && theta <= 1.6181)) throw std::invalid_argument("theta must lie in (0, 1.6181]");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");
    if (inner_sweeps < 1) throw std::invalid_argument("inner_sweeps must be positive");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
    if (!(eta_safety > 1.0)) throw std::invalid_argument("eta_safety must exceed 1");
    if (!(support_eps >= 0.0)) throw std::invalid_argument("support_eps must be non-negative");
    if (snapshot_interval < 1 || max_snapshots < 1) throw std::invalid_argument("snapshot settings must be positive");
}

Dataset parse_csv(std::istream& in)
{
    std::vector<double> labels;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    Index width = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto fields = split(body, ',');
        double label = 0.0;
        if (!parse_double(fields[0], label)) {
            if (rows.empty() && labels.empty() && width < 0) {
                width = static_cast<Index>(fields.size()) - 1;  // header
                continue;
            }
            throw data_error("malformed label on line " + std::to_string(line_no));
        }
        if (width < 0) width = static_cast<Index>(fields.size()) - 1;
        if (static_cast<Index>(fields.size()) - 1 != width) {
            throw data_error("line " + std::to_string(line_no) + " has " + std::to_string(fields.size() - 1) +
                             " features, expected " + std::to_string(width));
        }
        std::vector<double> row(width);
        for (Index j = 0; j < width; ++j) {
            if (!parse_double(fields[j + 1], row[j])) {
                throw data_error("non-numeric feature on line " + std::to_string(line_no) + ", column " +
                                 std::to_string(j + 2));
            }
        }
        labels.push_back(map_label(label, line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error("empty file: no samples");
    if (width < 1) throw data_error("no feature columns");
    Matrix X(static_cast<Index>(rows.size()), width);
    for (Index i = 0; i < X.rows(); ++i) {
        for (Index j = 0; j < width; ++j) X(i, j) = rows[i][j];
    }
    return Dataset(std::move(X), Eigen::Map<Vector>(labels.data(), static_cast<Index>(labels.size())));
}

Dataset parse_sparse(std::istream& in, Index min_features)
{
    struct Entry { Index row, col; double value; };
    std::vector<Entry> entries;
    std::vector<double> labels;
    std::string line;
    std::size_t line_no = 0;
    Index max_col = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::istringstream tokens{std::string(body)};
        std::string tok;
        tokens >> tok;
        double label = 0.0;
        if (!parse_double(tok, label)) throw data_error("malformed label on line " + std::to_string(line_no));
        const Index row = static_cast<Index>(labels.size());
        labels.push_back(map_label(label, line_no));
        Index last = 0;
        while (tokens >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) throw data_error("expected idx:value on line " + std::to_string(line_no));
            long long idx = 0;
            const auto idx_view = std::string_view(tok).substr(0, colon);
            const auto r = std::from_chars(idx_view.data(), idx_view.data() + idx_view.size(), idx);
            if (r.ec != std::errc{} || r.ptr != idx_view.data() + idx_view.size() || idx < 1) {
                throw data_error("malformed feature index on line " + std::to_string(line_no));
            }
            if (idx <= last) throw data_error("feature indices must be strictly increasing on line " + std::to_string(line_no));
            double value = 0.0;
            if (!parse_double(std::string_view(tok).substr(colon + 1), value)) {
                throw data_error("non-numeric feature on line " + std::to_string(line_no));
            }
            last = static_cast<Index>(idx);
            max_col = std::max(max_col, last);
            entries.push_back({row, last - 1, value});
        }
    }
    if (labels.empty()) throw data_error("empty file: no samples");
    const Index p = std::max(max_col, min_features);
    if (p < 1) throw data_error("no feature columns");
    Matrix X = Matrix::Zero(static_cast<Index>(labels.size()), p);
    for (const auto& e : entries) X(e.row, e.col) = e.value;
    return Dataset(std::move(X), Eigen::Map<Vector>(labels.data(), static_cast<Index>(labels.size())));
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format, Index min_features)
{
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path.string());
    return format == DataFormat::csv ? parse_csv(in) : parse_sparse(in, min_features);
}

void write_csv(std::ostream& out, const Dataset& data)
{
    out << 'y';
    for (Index j = 0; j < data.p(); ++j) out << ",f" << (j + 1);
    out << '\n';
    char buf[64];
    for (Index i = 0; i < data.n(); ++i) {
        out << (data.y()[i] > 0 ? "1" : "-1");
        for (Index j = 0; j < data.p(); ++j) {
            const auto r = std::to_chars(buf, buf + sizeof(buf), data.X()(i, j));
            out << ',' << std::string_view(buf, r.ptr - buf);
        }
        out << '\n';
    }
}

double hinge_sum(const Vector& margins)
{
    return (1.0 - margins.array()).max(0.0).sum();
}

double objective(const Dataset& data, const PenaltyWeights& w, double lambda, double beta0,
                 const Vector& beta_plus)
{
    if (beta_plus.size() != data.p() || w.size() != data.p()) {
        throw std::invalid_argument("objective: dimension mismatch");
    }
    Vector scores = data.X() * beta_plus;
    scores.array() += beta0;
    const Vector margins = data.y().cwiseProduct(scores);
    return hinge_sum(margins) / static_cast<double>(data.n()) +
           lambda * w.values().cwiseProduct(beta_plus.cwiseAbs()).sum();
}

double objective(const SignedDesign& design, const PenaltyWeights& w, double lambda, double beta0,
                 const Vector& beta_plus)
{
    if (beta_plus.size() != design.p() || w.size() != design.p()) {
        throw std::invalid_argument("objective: dimension mismatch");
    }
    return hinge_sum(design.margins(beta0, beta_plus)) / static_cast<double>(design.n()) +
           lambda * w.values().cwiseProduct(beta_plus.cwiseAbs()).sum();
}

}  // namespace ssvm
