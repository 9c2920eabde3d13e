// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <sstream>

#include "micarray/io.hpp"

namespace micarray::io {

void write_confusion_svg(const std::filesystem::path& path,
                         const Eigen::Matrix4i& confusion,
                         const std::vector<std::string>& class_names) {
  const int cell = 64;
  const int margin = 48;
  const int size = margin + 4 * cell + 8;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" font-family=\"monospace\" font-size=\"12\">\n";
  svg << "  <text x=\"" << margin + 2 * cell
      << "\" y=\"14\" text-anchor=\"middle\">predicted</text>\n";

  for (int r = 0; r < 4; ++r) {
    const double row_total = std::max(1, confusion.row(r).sum());
    for (int c = 0; c < 4; ++c) {
      const double frac = confusion(r, c) / row_total;
      const int shade = static_cast<int>(255 - 185 * frac);
      const int x = margin + c * cell;
      const int y = margin + r * cell;
      char color[16];
      std::snprintf(color, sizeof(color), "#%02x%02xff", shade, shade);
      svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << color
          << "\" stroke=\"#444\"/>\n";
      svg << "  <text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
          << "\" text-anchor=\"middle\">" << confusion(r, c) << "</text>\n";
    }
    svg << "  <text x=\"" << margin - 8 << "\" y=\"" << margin + r * cell + cell / 2 + 4
        << "\" text-anchor=\"end\">" << class_names[r] << "</text>\n";
    svg << "  <text x=\"" << margin + r * cell + cell / 2 << "\" y=\"" << margin - 8
        << "\" text-anchor=\"middle\">" << class_names[r] << "</text>\n";
  }
  svg << "</svg>\n";
  write_text_file(path, svg.str());
}

void write_curves_csv(const std::filesystem::path& path,
                      const nn::TrainCurves& curves) {
  std::ostringstream csv;
  csv << "epoch,train_loss,val_loss\n";
  for (size_t i = 0; i < curves.train_loss.size(); ++i) {
    csv << (i + 1) << "," << curves.train_loss[i] << "," << curves.val_loss[i]
        << "\n";
  }
  csv << "# best_epoch," << curves.best_epoch << "\n";
  write_text_file(path, csv.str());
}

void write_study_csv(const std::filesystem::path& path,
                     const detect::StudyTable& table) {
  std::ostringstream csv;
  csv << "velocity_mm_s";
  for (const double d : table.distances_mm) csv << "," << d << " mm";
  csv << "\n";
  for (size_t v = 0; v < table.velocities_mm_s.size(); ++v) {
    csv << table.velocities_mm_s[v];
    for (size_t d = 0; d < table.distances_mm.size(); ++d) {
      csv << ",\"" << table.at(v, d).format() << "\"";
    }
    csv << "\n";
  }
  csv << "\ndetection_rate";
  for (const double d : table.distances_mm) csv << "," << d << " mm";
  csv << "\n";
  for (size_t v = 0; v < table.velocities_mm_s.size(); ++v) {
    csv << table.velocities_mm_s[v];
    for (size_t d = 0; d < table.distances_mm.size(); ++d) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.3f", table.at(v, d).detection_rate);
      csv << "," << buf;
    }
    csv << "\n";
  }
  write_text_file(path, csv.str());
}

}  // namespace micarray::io
