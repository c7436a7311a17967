#include "stratcomm/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace stratcomm {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* dsbs_regime_name(DsbsRegime regime) {
  switch (regime) {
    case DsbsRegime::kThreePosterior: return "three-posterior";
    case DsbsRegime::kTwoPosterior: return "two-posterior";
    case DsbsRegime::kZeroDistortion: return "zero-distortion";
  }
  return "unknown";
}

nlohmann::json solve_result_to_json(const SolveResult& r) {
  nlohmann::json splitting = nlohmann::json::array();
  for (const WeightedBelief& wb : r.splitting) {
    splitting.push_back({{"weight", wb.weight}, {"posterior", wb.posterior}});
  }
  return {
      {"value", r.value},
      {"threshold_bits", r.threshold_bits},
      {"slack_bits", r.slack_bits},
      {"splitting", splitting},
      {"grid_step", r.grid_step},
      {"infimum_flag", r.infimum_flag},
  };
}

nlohmann::json dsbs_solution_to_json(const DsbsSolution& s) {
  return {
      {"regime", dsbs_regime_name(s.regime)},
      {"q_star", std::isfinite(s.q_star) ? nlohmann::json(s.q_star) : nlohmann::json()},
      {"value", s.value},
      {"posteriors", s.posteriors},
      {"weights", s.weights},
      {"alpha", s.alpha},
      {"beta", s.beta},
      {"c_threshold",
       std::isfinite(s.c_threshold) ? nlohmann::json(s.c_threshold) : nlohmann::json()},
  };
}

nlohmann::json trial_stats_to_json(const TrialStats& s) {
  auto finite_or_null = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
  };
  return {
      {"trials", s.trials},
      {"mean_encoder_distortion", s.mean_encoder_distortion},
      {"mean_decoder_distortion", s.mean_decoder_distortion},
      {"mean_wz_decoder_distortion", s.mean_wz_decoder_distortion},
      {"error_rate", s.error_rate},
      {"encode_failure_rate", s.encode_failure_rate},
      {"index_mismatch_rate", s.index_mismatch_rate},
      {"mean_conditional_kl", finite_or_null(s.mean_conditional_kl)},
      {"conditional_kl_trials", s.conditional_kl_trials},
      {"mean_frac_talpha", finite_or_null(s.mean_frac_talpha)},
      {"mean_agreement", s.mean_agreement},
  };
}

nlohmann::json capacity_result_to_json(const CapacityResult& r) {
  return {
      {"capacity_bits", r.capacity},
      {"input_dist", r.input_dist},
      {"gap_bits", r.gap},
      {"iterations", r.iterations},
  };
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!os) throw ValidationError("cannot write CSV file: " + path);
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file for digest: " + path);
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write file: " + path);
  os << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_svg_polyline(const std::string& path,
                        const std::vector<std::pair<double, double>>& points,
                        const std::string& x_label, const std::string& y_label) {
  if (points.empty()) throw ValidationError("svg: no points");
  double x_min = points[0].first, x_max = points[0].first;
  double y_min = points[0].second, y_max = points[0].second;
  for (const auto& [x, y] : points) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  if (x_max - x_min < 1e-300) x_max = x_min + 1.0;
  if (y_max - y_min < 1e-300) y_max = y_min + 1.0;
  const double w = 640, h = 480, margin = 60;
  auto sx = [&](double x) { return margin + (x - x_min) / (x_max - x_min) * (w - 2 * margin); };
  auto sy = [&](double y) { return h - margin - (y - y_min) / (y_max - y_min) * (h - 2 * margin); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
     << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin
     << "\" y2=\"" << h - margin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
     << "\" y2=\"" << h - margin << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 15
     << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label << "</text>\n";
  os << "<text x=\"15\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"14\" "
     << "transform=\"rotate(-90 15 " << h / 2 << ")\">" << y_label << "</text>\n";
  os << "<text x=\"" << margin << "\" y=\"" << h - margin + 20
     << "\" font-size=\"11\">" << format_double(x_min) << "</text>\n";
  os << "<text x=\"" << w - margin << "\" y=\"" << h - margin + 20
     << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(x_max) << "</text>\n";
  os << "<text x=\"" << margin - 5 << "\" y=\"" << h - margin
     << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(y_min) << "</text>\n";
  os << "<text x=\"" << margin - 5 << "\" y=\"" << margin
     << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(y_max) << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"#c1440e\" stroke-width=\"1.5\" points=\"";
  for (const auto& [x, y] : points) os << sx(x) << "," << sy(y) << " ";
  os << "\"/>\n</svg>\n";
  write_text_file(path, os.str());
}

}  // namespace stratcomm
