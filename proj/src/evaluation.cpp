#include "oicp/evaluation.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "oicp/errors.hpp"

namespace oicp {

namespace {

struct MatchedPoses {
  std::vector<RigidTransformd> est;
  std::vector<RigidTransformd> truth;
};

MatchedPoses match(const Trajectory& est, const Trajectory& truth, double max_dt) {
  Trajectory e = est, t = truth;
  e.normalize();
  t.normalize();
  std::vector<double> ts_e, ts_t;
  for (const auto& x : e.entries) ts_e.push_back(x.timestamp);
  for (const auto& x : t.entries) ts_t.push_back(x.timestamp);
  MatchedPoses m;
  for (const auto& [i, j] : associate_timestamps(ts_e, ts_t, max_dt)) {
    m.est.push_back(e.entries[i].pose);
    m.truth.push_back(t.entries[j].pose);
  }
  return m;
}

RigidTransformd umeyama_rigid(const std::vector<RigidTransformd>& est,
                              const std::vector<RigidTransformd>& truth) {
  const size_t n = est.size();
  if (n < 3) {
    throw Error(ErrorCode::kInsufficientOverlap,
                "need at least 3 matched poses, have " + std::to_string(n));
  }
  Eigen::Vector3d mean_e = Eigen::Vector3d::Zero(), mean_t = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < n; ++i) {
    mean_e += est[i].translation;
    mean_t += truth[i].translation;
  }
  mean_e /= static_cast<double>(n);
  mean_t /= static_cast<double>(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (size_t i = 0; i < n; ++i) {
    cov += (truth[i].translation - mean_t) * (est[i].translation - mean_e).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d& sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[1] <= sv[0] * 1e-9) {
    throw Error(ErrorCode::kDegenerateAlignment, "matched positions are collinear");
  }
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    if (sv[2] > sv[0] * 1e-9) {
      // Full-rank data whose optimal orthogonal alignment is a reflection:
      // refuse rather than silently return the nearest proper rotation.
      throw Error(ErrorCode::kDegenerateAlignment, "alignment would require a reflection");
    }
    d(2, 2) = -1.0;
  }
  RigidTransformd align;
  align.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  align.translation = mean_t - align.rotation * mean_e;
  return align;
}

}  // namespace

RigidTransformd align_umeyama(const Trajectory& est, const Trajectory& truth, double max_dt) {
  const MatchedPoses m = match(est, truth, max_dt);
  return umeyama_rigid(m.est, m.truth);
}

AteReport ate(const Trajectory& est, const Trajectory& truth, double max_dt) {
  const MatchedPoses m = match(est, truth, max_dt);
  AteReport report;
  report.alignment = umeyama_rigid(m.est, m.truth);
  report.errors.reserve(m.est.size());
  double sq = 0.0, sum = 0.0;
  for (size_t i = 0; i < m.est.size(); ++i) {
    const double e = (apply(report.alignment, m.est[i].translation) - m.truth[i].translation).norm();
    report.errors.push_back(e);
    sq += e * e;
    sum += e;
    report.max = std::max(report.max, e);
  }
  const double n = static_cast<double>(report.errors.size());
  report.rmse = std::sqrt(sq / n);
  report.mean = sum / n;
  std::vector<double> sorted = report.errors;
  std::sort(sorted.begin(), sorted.end());
  report.median = sorted.size() % 2 == 1
                      ? sorted[sorted.size() / 2]
                      : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  return report;
}

RpeReport rpe(const Trajectory& est, const Trajectory& truth, int delta_frames, double max_dt) {
  if (delta_frames < 1) throw Error(ErrorCode::kBadConfig, "rpe delta must be >= 1");
  const MatchedPoses m = match(est, truth, max_dt);
  RpeReport report;
  report.delta_frames = delta_frames;
  if (m.est.size() <= static_cast<size_t>(delta_frames)) {
    throw Error(ErrorCode::kInsufficientOverlap, "no full interval fits the matched sequence");
  }
  double sq = 0.0;
  for (size_t i = 0; i + delta_frames < m.est.size(); ++i) {
    const RigidTransformd rel_est = compose(inverse(m.est[i]), m.est[i + delta_frames]);
    const RigidTransformd rel_truth = compose(inverse(m.truth[i]), m.truth[i + delta_frames]);
    const double e = compose(inverse(rel_truth), rel_est).translation.norm();
    report.errors.push_back(e);
    sq += e * e;
  }
  report.rmse = std::sqrt(sq / static_cast<double>(report.errors.size()));
  return report;
}

namespace {

std::string pct_or_na(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string ComparisonReport::to_csv() const {
  std::ostringstream out;
  out << "run,ate_rmse_m,rpe_rmse_m,ate_improvement_pct,rpe_improvement_pct\n";
  char buf[128];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,", row.run.c_str(), row.ate_rmse, row.rpe_rmse);
    out << buf << pct_or_na(row.ate_improvement_pct) << "," << pct_or_na(row.rpe_improvement_pct)
        << "\n";
  }
  return out.str();
}

std::string ComparisonReport::render_text() const {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-24s %14s %14s %10s %10s\n", "run", "ate_rmse[m]", "rpe_rmse[m]",
                "ate_impr%", "rpe_impr%");
  out << buf;
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%-24s %14.6f %14.6f %10s %10s\n", row.run.c_str(),
                  row.ate_rmse, row.rpe_rmse, pct_or_na(row.ate_improvement_pct).c_str(),
                  pct_or_na(row.rpe_improvement_pct).c_str());
    out << buf;
  }
  return out.str();
}

ComparisonReport compare_report(const std::vector<std::pair<std::string, Trajectory>>& runs,
                                const Trajectory& truth, int rpe_delta_frames, double max_dt) {
  if (runs.empty()) throw Error(ErrorCode::kBadConfig, "no runs to compare");
  ComparisonReport report;
  for (const auto& [name, trajectory] : runs) {
    ComparisonRow row;
    row.run = name;
    row.ate_rmse = ate(trajectory, truth, max_dt).rmse;
    row.rpe_rmse = rpe(trajectory, truth, rpe_delta_frames, max_dt).rmse;
    report.rows.push_back(row);
  }
  const double base_ate = report.rows.front().ate_rmse;
  const double base_rpe = report.rows.front().rpe_rmse;
  for (auto& row : report.rows) {
    row.ate_improvement_pct = base_ate > 0.0 ? (1.0 - row.ate_rmse / base_ate) * 100.0
                                             : std::numeric_limits<double>::quiet_NaN();
    row.rpe_improvement_pct = base_rpe > 0.0 ? (1.0 - row.rpe_rmse / base_rpe) * 100.0
                                             : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

void write_trajectory_svg(const Trajectory& est, const Trajectory& truth,
                          const std::filesystem::path& path, double max_dt) {
  const MatchedPoses m = match(est, truth, max_dt);
  const RigidTransformd align = umeyama_rigid(m.est, m.truth);

  double min_x = 1e30, max_x = -1e30, min_z = 1e30, max_z = -1e30;
  auto extend = [&](const Eigen::Vector3d& p) {
    min_x = std::min(min_x, p.x());
    max_x = std::max(max_x, p.x());
    min_z = std::min(min_z, p.z());
    max_z = std::max(max_z, p.z());
  };
  std::vector<Eigen::Vector3d> est_aligned;
  for (size_t i = 0; i < m.est.size(); ++i) {
    est_aligned.push_back(apply(align, m.est[i].translation));
    extend(est_aligned.back());
    extend(m.truth[i].translation);
  }
  const double span = std::max({max_x - min_x, max_z - min_z, 1e-6});
  const double pad = 0.05 * span;
  const double scale = 560.0 / (span + 2 * pad);
  auto px = [&](const Eigen::Vector3d& p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f", (p.x() - min_x + pad) * scale,
                  (p.z() - min_z + pad) * scale);
    return std::string(buf);
  };

  std::ofstream out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
         "viewBox=\"0 0 600 600\">\n<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  for (size_t i = 0; i < est_aligned.size(); ++i) {
    const std::string a = px(m.truth[i].translation), b = px(est_aligned[i]);
    out << "<line x1=\"" << a.substr(0, a.find(',')) << "\" y1=\"" << a.substr(a.find(',') + 1)
        << "\" x2=\"" << b.substr(0, b.find(',')) << "\" y2=\"" << b.substr(b.find(',') + 1)
        << "\" stroke=\"red\" stroke-width=\"0.6\"/>\n";
  }
  auto polyline = [&](const std::vector<Eigen::Vector3d>& pts, const char* color) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (const auto& p : pts) out << px(p) << " ";
    out << "\"/>\n";
  };
  std::vector<Eigen::Vector3d> truth_pts;
  for (const auto& pose : m.truth) truth_pts.push_back(pose.translation);
  polyline(truth_pts, "black");
  polyline(est_aligned, "blue");
  out << "</svg>\n";
}

}  // namespace oicp
