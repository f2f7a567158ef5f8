#include "pcopt/sample_set.hpp"

#include "pcopt/error.hpp"
#include "pcopt/text.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace pcopt {

namespace {

void validate(const Eigen::MatrixXd& points, const Eigen::VectorXd& values,
              const Eigen::VectorXd& densities) {
    if (points.cols() < 1) throw Error(Errc::empty_sample, "sample set needs at least one row");
    if (values.size() != points.cols() || densities.size() != points.cols()) {
        throw Error(Errc::invalid_input, "points, objective values and densities differ in length");
    }
    for (Eigen::Index i = 0; i < densities.size(); ++i) {
        if (!(densities[i] > 0.0) || !std::isfinite(densities[i])) {
            throw Error(Errc::invalid_input,
                        "proposal density of row " + std::to_string(i) + " is not positive and finite");
        }
    }
}

}  // namespace

SampleSet::SampleSet(Eigen::MatrixXd points, Eigen::VectorXd objective_values,
                     Eigen::VectorXd proposal_densities)
    : points_(std::move(points)), values_(std::move(objective_values)), densities_(std::move(proposal_densities)) {
    validate(points_, values_, densities_);
}

SampleSet::SampleSet(const ProposalDraw& draw, Eigen::VectorXd objective_values)
    : SampleSet(draw.points, std::move(objective_values), draw.proposal_densities) {}

SampleSet SampleSet::subset(std::span<const Eigen::Index> indices) const {
    const auto k = static_cast<Eigen::Index>(indices.size());
    Eigen::MatrixXd p(dimension(), k);
    Eigen::VectorXd g(k), h(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto i = indices[static_cast<std::size_t>(j)];
        if (i < 0 || i >= size()) throw Error(Errc::invalid_input, "subset index out of range");
        p.col(j) = points_.col(i);
        g[j] = values_[i];
        h[j] = densities_[i];
    }
    return SampleSet(std::move(p), std::move(g), std::move(h));
}

void SampleSet::append(const SampleSet& other) {
    if (other.empty()) return;
    if (empty()) {
        *this = other;
        return;
    }
    if (other.dimension() != dimension()) {
        throw Error(Errc::dimension_mismatch, "cannot append sample sets of different dimension");
    }
    const auto m = size();
    const auto k = other.size();
    points_.conservativeResize(Eigen::NoChange, m + k);
    points_.rightCols(k) = other.points_;
    values_.conservativeResize(m + k);
    values_.tail(k) = other.values_;
    densities_.conservativeResize(m + k);
    densities_.tail(k) = other.densities_;
}

void SampleSet::write_columns(std::ostream& out) const {
    for (Eigen::Index d = 0; d < dimension(); ++d) out << 'x' << d << ',';
    out << "G,h\n";
    for (Eigen::Index i = 0; i < size(); ++i) {
        for (Eigen::Index d = 0; d < dimension(); ++d) out << text::format_double(points_(d, i)) << ',';
        out << text::format_double(values_[i]) << ',' << text::format_double(densities_[i]) << '\n';
    }
}

SampleSet SampleSet::read_columns(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::io_error, "sample file has no header");
    const auto header = text::split(line, ",");
    if (header.size() < 3 || header[header.size() - 2] != "G" || header.back() != "h") {
        throw Error(Errc::invalid_input, "sample header must end with G,h");
    }
    const auto n = static_cast<Eigen::Index>(header.size() - 2);
    std::vector<double> flat;
    Eigen::Index rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = text::split(line, ",");
        if (static_cast<Eigen::Index>(fields.size()) != n + 2) {
            throw Error(Errc::invalid_input, "sample row " + std::to_string(rows) + " has wrong field count");
        }
        for (auto f : fields) flat.push_back(text::parse_double(f));
        ++rows;
    }
    Eigen::MatrixXd p(n, rows);
    Eigen::VectorXd g(rows), h(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto* row = flat.data() + i * (n + 2);
        for (Eigen::Index d = 0; d < n; ++d) p(d, i) = row[d];
        g[i] = row[n];
        h[i] = row[n + 1];
    }
    return SampleSet(std::move(p), std::move(g), std::move(h));
}

}  // namespace pcopt
