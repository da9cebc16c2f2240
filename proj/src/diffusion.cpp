#include <geofuse/diffusion.hpp>
#include <geofuse/error.hpp>

#include <cmath>

namespace geofuse {

std::vector<double> default_hks_times()
{
    return {1024.0, 1351.2, 1782.9, 2352.5, 4096.0};
}

namespace {

void check_time(double t)
{
    if (!(t > 0.0)) throw InvalidArgument("diffusion time must be positive");
}

void check_vertex(const SpectralBasis& basis, int i)
{
    if (i < 0 || i >= basis.num_vertices()) {
        throw InvalidArgument("vertex index " + std::to_string(i) + " out of range");
    }
}

} // namespace

Eigen::VectorXd heat_kernel(const SpectralBasis& basis, double t, int source)
{
    check_time(t);
    check_vertex(basis, source);
    const Eigen::VectorXd coeffs =
        (-t * basis.lambdas.array()).exp().matrix().cwiseProduct(basis.phis.row(source).transpose());
    return basis.phis * coeffs;
}

HksDescriptorField hks_field(const SpectralBasis& basis, std::span<const double> times, double eta)
{
    if (times.empty()) throw InvalidArgument("HKS needs at least one time");
    for (std::size_t m = 0; m < times.size(); ++m) {
        check_time(times[m]);
        if (m > 0 && !(times[m] > times[m - 1])) throw InvalidArgument("HKS times must be increasing");
    }
    const Eigen::Map<const Eigen::RowVectorXd> t(times.data(), static_cast<Eigen::Index>(times.size()));
    const Eigen::MatrixXd decay = (-(basis.lambdas * t)).array().exp().matrix();

    HksDescriptorField field;
    field.times.assign(times.begin(), times.end());
    field.values = basis.phis.array().square().matrix() * decay;
    field.eta = eta;
    return field;
}

double diffusion_distance(const SpectralBasis& basis, double t, int i, int j)
{
    check_time(t);
    check_vertex(basis, i);
    check_vertex(basis, j);
    if (i == j) return 0.0;
    double sum = 0.0;
    for (Eigen::Index k = 0; k < basis.num_eigenpairs(); ++k) {
        const double diff = basis.phis(i, k) - basis.phis(j, k);
        sum += std::exp(-basis.lambdas(k) * t) * diff * diff;
    }
    return std::sqrt(sum);
}

double averaged_distance(const SpectralBasis& basis, std::span<const double> times, int i, int j)
{
    if (times.empty()) throw InvalidArgument("time set T is empty");
    double sum = 0.0;
    for (double t : times) sum += diffusion_distance(basis, t, i, j);
    return sum / static_cast<double>(times.size());
}

namespace {

const SpectralBasis& basis_for(const BasisByEta& bases, double eta)
{
    auto it = bases.find(eta);
    if (it == bases.end() || it->second == nullptr) {
        throw InvalidArgument("no spectral basis for eta=" + std::to_string(eta));
    }
    return *it->second;
}

} // namespace

double joint_multiscale_distance(
    const BasisByEta& bases,
    std::span<const double> times,
    std::span<const double> etas,
    int i,
    int j)
{
    if (times.empty()) throw InvalidArgument("time set T is empty");
    if (etas.empty()) throw InvalidArgument("eta set H is empty");
    for (double eta : etas) basis_for(bases, eta);
    double sum = 0.0;
    for (double t : times) {
        double product = 1.0;
        for (double eta : etas) product *= diffusion_distance(basis_for(bases, eta), t, i, j);
        sum += product;
    }
    return sum / static_cast<double>(times.size());
}

Eigen::MatrixXd diffusion_coordinates(const SpectralBasis& basis, double t, std::span<const int> sample)
{
    check_time(t);
    Eigen::MatrixXd coords(static_cast<Eigen::Index>(sample.size()), basis.num_eigenpairs());
    const Eigen::RowVectorXd weight = (-0.5 * t * basis.lambdas.array()).exp().matrix().transpose();
    for (std::size_t r = 0; r < sample.size(); ++r) {
        check_vertex(basis, sample[r]);
        coords.row(static_cast<Eigen::Index>(r)) = basis.phis.row(sample[r]).cwiseProduct(weight);
    }
    return coords;
}

Eigen::MatrixXd multiscale_distance_matrix(
    const BasisByEta& bases,
    std::span<const double> times,
    std::span<const double> etas,
    std::span<const int> sample)
{
    if (times.empty()) throw InvalidArgument("time set T is empty");
    if (etas.empty()) throw InvalidArgument("eta set H is empty");
    const auto m = static_cast<Eigen::Index>(sample.size());
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(m, m);
    for (double t : times) {
        Eigen::MatrixXd product = Eigen::MatrixXd::Ones(m, m);
        for (double eta : etas) {
            const Eigen::MatrixXd Y = diffusion_coordinates(basis_for(bases, eta), t, sample);
            for (Eigen::Index b = 0; b < m; ++b) {
                product(b, b) = 0.0;
                for (Eigen::Index a = b + 1; a < m; ++a) {
                    const double d = (Y.row(a) - Y.row(b)).norm();
                    product(a, b) *= d;
                    product(b, a) = product(a, b);
                }
            }
        }
        total += product;
    }
    return total / static_cast<double>(times.size());
}

} // namespace geofuse
