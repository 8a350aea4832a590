#include "seqrc/metrics.hpp"

#include "seqrc/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace seqrc {

namespace {

void require_same_size(Index a, Index b, const char* what)
{
    if (a != b)
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": sizes " + std::to_string(a) + " and " +
                                                      std::to_string(b) + " differ");
}

std::ofstream open_csv(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    return out;
}

// Valid-mode separable filter of a row-major h x w image.
RowMatrix filter_valid(const RowMatrix& img, const Vector& taps)
{
    const Index k = taps.size();
    const Index h = img.rows() - k + 1;
    const Index w = img.cols() - k + 1;
    RowMatrix rows_done(img.rows(), w);
    for (Index r = 0; r < img.rows(); ++r)
        for (Index c = 0; c < w; ++c) rows_done(r, c) = img.row(r).segment(c, k).dot(taps.transpose());
    RowMatrix out(h, w);
    for (Index r = 0; r < h; ++r) {
        out.row(r).setZero();
        for (Index t = 0; t < k; ++t) out.row(r) += taps[t] * rows_done.row(r + t);
    }
    return out;
}

}  // namespace

void VptConfig::validate(Index dim) const
{
    if (!(threshold >= 0.0)) throw Error(ErrorCode::InvalidSpec, "VPT threshold must be >= 0");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidSpec, "VPT dt must be positive");
    require_same_size(sigma.size(), dim, "VPT sigma");
    if (!(sigma.array() > 0.0).all()) throw Error(ErrorCode::InvalidSpec, "VPT sigma entries must be positive");
}

double nrmse_at(const Eigen::Ref<const Vector>& pred, const Eigen::Ref<const Vector>& truth,
                const Eigen::Ref<const Vector>& sigma)
{
    require_same_size(pred.size(), truth.size(), "nrmse");
    require_same_size(pred.size(), sigma.size(), "nrmse sigma");
    if (pred.size() == 0) return 0.0;
    return std::sqrt(((pred - truth).array() / sigma.array()).square().mean());
}

Vector nrmse_curve(const RowMatrix& pred, const RowMatrix& truth, const Vector& sigma)
{
    require_same_size(pred.rows(), truth.rows(), "nrmse curve steps");
    require_same_size(pred.cols(), truth.cols(), "nrmse curve dimension");
    Vector out(pred.rows());
    for (Index k = 0; k < pred.rows(); ++k) out[k] = nrmse_at(pred.row(k).transpose(), truth.row(k).transpose(), sigma);
    return out;
}

double vpt_from_curve(const Vector& nrmse, double threshold, double dt)
{
    for (Index k = 0; k < nrmse.size(); ++k)
        if (nrmse[k] >= threshold) return static_cast<double>(k + 1) * dt;
    return static_cast<double>(nrmse.size()) * dt;
}

double vpt(const SeriesData& pred, const SeriesData& truth, const VptConfig& config)
{
    config.validate(truth.dim());
    return vpt_from_curve(nrmse_curve(pred.values, truth.values, config.sigma), config.threshold, config.dt);
}

ReturnMap return_map(const Eigen::Ref<const Vector>& z)
{
    ReturnMap map;
    const Index n = z.size();
    Index j = 1;
    while (j + 1 < n) {
        if (z[j - 1] < z[j]) {
            Index end = j;
            while (end + 1 < n && z[end + 1] == z[j]) ++end;
            if (end + 1 < n && z[end + 1] < z[j]) map.peaks.push_back(j);
            j = end + 1;
        } else {
            ++j;
        }
    }
    for (std::size_t i = 0; i + 1 < map.peaks.size(); ++i) map.pairs.emplace_back(z[map.peaks[i]], z[map.peaks[i + 1]]);
    return map;
}

double rmse(const Eigen::Ref<const Vector>& pred, const Eigen::Ref<const Vector>& truth)
{
    require_same_size(pred.size(), truth.size(), "rmse");
    if (pred.size() == 0) return 0.0;
    return std::sqrt((pred - truth).squaredNorm() / static_cast<double>(pred.size()));
}

std::optional<double> psnr(const Eigen::Ref<const Vector>& pred, const Eigen::Ref<const Vector>& truth, double max_val)
{
    require_same_size(pred.size(), truth.size(), "psnr");
    if (!(max_val > 0.0)) throw Error(ErrorCode::InvalidSpec, "PSNR max_val must be positive");
    const double mse = (pred - truth).squaredNorm() / static_cast<double>(std::max<Index>(pred.size(), 1));
    if (mse == 0.0) return std::nullopt;
    return 10.0 * std::log10(max_val * max_val / mse);
}

Vector gaussian_taps(Index size, double sigma)
{
    Vector taps(size);
    const double centre = 0.5 * static_cast<double>(size - 1);
    for (Index i = 0; i < size; ++i) {
        const double d = static_cast<double>(i) - centre;
        taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    return taps / taps.sum();
}

double ssim(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, FieldShape shape,
            double dynamic_range, const SsimOptions& options)
{
    require_same_size(a.size(), b.size(), "ssim");
    require_same_size(a.size(), shape.height * shape.width, "ssim shape");
    if (!(dynamic_range > 0.0)) throw Error(ErrorCode::InvalidSpec, "SSIM dynamic range must be positive");
    const double c1 = std::pow(options.k1 * dynamic_range, 2);
    const double c2 = std::pow(options.k2 * dynamic_range, 2);

    if (options.mode == SsimMode::global) {
        const double n = static_cast<double>(a.size());
        const double ma = a.sum() / n;
        const double mb = b.sum() / n;
        // One loop keeps cov and the variances bitwise equal when a == b.
        double saa = 0.0, sbb = 0.0, sab = 0.0;
        for (Index i = 0; i < a.size(); ++i) {
            const double da = a[i] - ma;
            const double db = b[i] - mb;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
        }
        const double va = saa / n;
        const double vb = sbb / n;
        const double cov = sab / n;
        return ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }

    if (options.window < 1 || options.window > shape.height || options.window > shape.width)
        throw Error(ErrorCode::InvalidSpec, "SSIM window does not fit the field");
    const Vector taps = gaussian_taps(options.window, options.sigma);
    const Eigen::Map<const RowMatrix> img_a(a.data(), shape.height, shape.width);
    const Eigen::Map<const RowMatrix> img_b(b.data(), shape.height, shape.width);
    const RowMatrix mu_a = filter_valid(img_a, taps);
    const RowMatrix mu_b = filter_valid(img_b, taps);
    const RowMatrix saa = filter_valid(img_a.cwiseProduct(img_a), taps) - mu_a.cwiseProduct(mu_a);
    const RowMatrix sbb = filter_valid(img_b.cwiseProduct(img_b), taps) - mu_b.cwiseProduct(mu_b);
    const RowMatrix sab = filter_valid(img_a.cwiseProduct(img_b), taps) - mu_a.cwiseProduct(mu_b);
    const auto num = (2.0 * mu_a.array() * mu_b.array() + c1) * (2.0 * sab.array() + c2);
    const auto den = (mu_a.array().square() + mu_b.array().square() + c1) * (saa.array() + sbb.array() + c2);
    return (num / den).mean();
}

FieldCurves field_curves(const RowMatrix& pred, const RowMatrix& truth, FieldShape shape, double dynamic_range,
                         const SsimOptions& options)
{
    require_same_size(pred.rows(), truth.rows(), "field curve steps");
    require_same_size(pred.cols(), truth.cols(), "field curve dimension");
    FieldCurves c;
    c.rmse.resize(pred.rows());
    c.psnr.resize(pred.rows());
    c.ssim.resize(pred.rows());
    for (Index k = 0; k < pred.rows(); ++k) {
        const Vector p = pred.row(k).transpose();
        const Vector t = truth.row(k).transpose();
        c.rmse[k] = rmse(p, t);
        c.psnr[k] = psnr(p, t, dynamic_range).value_or(std::numeric_limits<double>::quiet_NaN());
        c.ssim[k] = ssim(p, t, shape, dynamic_range, options);
    }
    return c;
}

Index ssim_horizon(const Vector& ssim_curve, double threshold)
{
    for (Index k = 0; k < ssim_curve.size(); ++k)
        if (ssim_curve[k] < threshold) return k + 1;
    return ssim_curve.size();
}

void write_field_curves_csv(const FieldCurves& curves, const std::filesystem::path& path)
{
    auto out = open_csv(path);
    out << "lead_step,rmse,psnr,ssim\n";
    for (Index k = 0; k < curves.rmse.size(); ++k) {
        out << k + 1 << ',' << curves.rmse[k] << ',';
        if (!std::isnan(curves.psnr[k])) out << curves.psnr[k];
        out << ',' << curves.ssim[k] << '\n';
    }
}

void write_nrmse_csv(const Vector& nrmse, const std::filesystem::path& path)
{
    auto out = open_csv(path);
    out << "lead_step,nrmse\n";
    for (Index k = 0; k < nrmse.size(); ++k) out << k + 1 << ',' << nrmse[k] << '\n';
}

void write_return_map_csv(const ReturnMap& map, const std::filesystem::path& path)
{
    auto out = open_csv(path);
    out << "z_i,z_next\n";
    for (const auto& [a, b] : map.pairs) out << a << ',' << b << '\n';
}

}  // namespace seqrc
