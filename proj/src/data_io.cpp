#include "wsfuse/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wsfuse/rng.hpp"

namespace wsfuse {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_int(const std::string& cell, long& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

// all non-empty lines of a file, stripped of \r
std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

bool looks_like_header(const std::string& line) {
  for (const auto& cell : split_csv_line(line)) {
    double v;
    if (!parse_double(cell, v)) return true;
  }
  return false;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

WeakDataset load_dataset(const std::string& features_path, const std::string& votes_path,
                         const std::string& gold_path, std::size_t n_classes) {
  if (n_classes < 2) throw ConfigError("load_dataset: need at least 2 classes");

  auto feat_lines = read_lines(features_path);
  std::size_t feat_start = 0;
  if (!feat_lines.empty() && looks_like_header(feat_lines[0])) feat_start = 1;
  const std::size_t n = feat_lines.size() - feat_start;
  if (n == 0) throw ParseError(features_path + ": no data rows");

  std::size_t dim = split_csv_line(feat_lines[feat_start]).size();
  Tensor2 features(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto cells = split_csv_line(feat_lines[feat_start + i]);
    if (cells.size() != dim)
      throw ParseError(features_path + ":" + std::to_string(feat_start + i + 1) + ": expected " +
                       std::to_string(dim) + " columns, got " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < dim; ++j) {
      double v;
      if (!parse_double(cells[j], v))
        throw ParseError(features_path + ":" + std::to_string(feat_start + i + 1) +
                         ": non-numeric cell '" + cells[j] + "'");
      features(i, j) = v;
    }
  }

  auto vote_lines = read_lines(votes_path);
  std::size_t vote_start = 0;
  if (!vote_lines.empty() && looks_like_header(vote_lines[0])) vote_start = 1;
  const std::size_t vn = vote_lines.size() - vote_start;
  if (vn != n)
    throw ParseError("row-count mismatch: " + features_path + " has " + std::to_string(n) +
                     " rows, " + votes_path + " has " + std::to_string(vn));
  const std::size_t k = split_csv_line(vote_lines[vote_start]).size();
  std::vector<int> votes(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    auto cells = split_csv_line(vote_lines[vote_start + i]);
    if (cells.size() != k)
      throw ParseError(votes_path + ":" + std::to_string(vote_start + i + 1) + ": expected " +
                       std::to_string(k) + " columns, got " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < k; ++j) {
      long v;
      if (!parse_int(cells[j], v))
        throw ParseError(votes_path + ":" + std::to_string(vote_start + i + 1) +
                         ": non-integer cell '" + cells[j] + "'");
      if (v != kAbstain && (v < 0 || std::size_t(v) >= n_classes))
        throw ParseError(votes_path + ":" + std::to_string(vote_start + i + 1) + ": vote " +
                         std::to_string(v) + " outside [0, " + std::to_string(n_classes) + ")");
      votes[i * k + j] = int(v);
    }
  }

  std::vector<int> gold;
  if (!gold_path.empty()) {
    auto gold_lines = read_lines(gold_path);
    std::size_t gold_start = 0;
    if (!gold_lines.empty() && looks_like_header(gold_lines[0])) gold_start = 1;
    const std::size_t gn = gold_lines.size() - gold_start;
    if (gn != n)
      throw ParseError("row-count mismatch: " + features_path + " has " + std::to_string(n) +
                       " rows, " + gold_path + " has " + std::to_string(gn));
    gold.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      long v;
      if (!parse_int(trim(gold_lines[gold_start + i]), v) || v < 0 || std::size_t(v) >= n_classes)
        throw ParseError(gold_path + ":" + std::to_string(gold_start + i + 1) +
                         ": invalid gold label '" + gold_lines[gold_start + i] + "'");
      gold[i] = int(v);
    }
  }

  WeakDataset ds;
  ds.features = std::move(features);
  ds.votes = VoteMatrix(n, k, std::move(votes), n_classes);
  ds.gold = std::move(gold);
  ds.n_classes = n_classes;
  ds.source = features_path + "," + votes_path + (gold_path.empty() ? "" : "," + gold_path);
  if (ds.votes.non_abstained().empty())
    std::cerr << "warning: every row abstains (|D_t| = 0)\n";
  return ds;
}

void save_dataset_csv(const WeakDataset& ds, const std::string& features_path,
                      const std::string& votes_path, const std::string& gold_path) {
  {
    std::ofstream out(features_path);
    if (!out) throw ParseError("cannot write " + features_path);
    for (std::size_t j = 0; j < ds.dim(); ++j) out << (j ? ",f" : "f") << j;
    out << "\n";
    for (std::size_t i = 0; i < ds.n(); ++i) {
      auto r = ds.features.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << fmt(r[j]);
      out << "\n";
    }
  }
  {
    std::ofstream out(votes_path);
    if (!out) throw ParseError("cannot write " + votes_path);
    for (std::size_t j = 0; j < ds.votes.n_lfs(); ++j) out << (j ? ",lf" : "lf") << j;
    out << "\n";
    for (std::size_t i = 0; i < ds.n(); ++i) {
      for (std::size_t j = 0; j < ds.votes.n_lfs(); ++j)
        out << (j ? "," : "") << ds.votes.vote(i, j);
      out << "\n";
    }
  }
  if (!gold_path.empty() && ds.has_gold()) {
    std::ofstream out(gold_path);
    if (!out) throw ParseError("cannot write " + gold_path);
    out << "gold\n";
    for (int g : ds.gold) out << g << "\n";
  }
}

WeakDataset synth_dataset(std::size_t n_classes, std::size_t n, std::size_t dim,
                          const std::vector<LfSpec>& lfs, MixtureParams mixture,
                          std::uint64_t seed) {
  if (n_classes < 2) throw ConfigError("synth_dataset: need at least 2 classes");
  if (n == 0 || dim == 0) throw ConfigError("synth_dataset: n and dim must be positive");
  if (lfs.empty()) throw ConfigError("synth_dataset: need at least one label function");
  for (const auto& lf : lfs) {
    if (lf.accuracy <= 0.0 || lf.accuracy > 1.0)
      throw ConfigError("synth_dataset: accuracy must lie in (0, 1]");
    if (lf.propensity < 0.0 || lf.propensity > 1.0)
      throw ConfigError("synth_dataset: propensity must lie in [0, 1]");
  }

  // component means on a circle in the first two dimensions (line when d == 1)
  Tensor2 means(n_classes, dim);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double angle = 2.0 * 3.14159265358979323846 * double(c) / double(n_classes);
    if (dim == 1) {
      means(c, 0) = mixture.spread * (double(c) - double(n_classes - 1) / 2.0);
    } else {
      means(c, 0) = mixture.spread * std::cos(angle);
      means(c, 1) = mixture.spread * std::sin(angle);
    }
  }

  Rng rng(seed);
  Tensor2 features(n, dim);
  std::vector<int> gold(n);
  std::vector<int> votes(n * lfs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = rng.uniform_index(n_classes);
    gold[i] = int(c);
    for (std::size_t j = 0; j < dim; ++j)
      features(i, j) = means(c, j) + mixture.stddev * rng.normal();
    for (std::size_t k = 0; k < lfs.size(); ++k) {
      int v = kAbstain;
      if (rng.uniform() < lfs[k].propensity) {
        if (rng.uniform() < lfs[k].accuracy) {
          v = int(c);
        } else {
          std::size_t wrong = rng.uniform_index(n_classes - 1);
          if (wrong >= c) ++wrong;
          v = int(wrong);
        }
      }
      votes[i * lfs.size() + k] = v;
    }
  }

  WeakDataset ds;
  ds.features = std::move(features);
  ds.votes = VoteMatrix(n, lfs.size(), std::move(votes), n_classes);
  ds.gold = std::move(gold);
  ds.n_classes = n_classes;
  ds.seed = seed;
  std::ostringstream desc;
  desc << "synth(C=" << n_classes << ",n=" << n << ",d=" << dim << ",K=" << lfs.size()
       << ",seed=" << seed << ")";
  ds.source = desc.str();
  return ds;
}

std::vector<LfStats> lf_statistics(const WeakDataset& ds) {
  if (!ds.has_gold()) throw DomainError("lf_statistics: dataset has no gold labels");
  std::vector<LfStats> out(ds.votes.n_lfs());
  for (std::size_t k = 0; k < ds.votes.n_lfs(); ++k) {
    std::size_t voted = 0, correct = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      const int v = ds.votes.vote(i, k);
      if (v == kAbstain) continue;
      ++voted;
      if (v == ds.gold[i]) ++correct;
    }
    out[k].coverage = ds.n() ? double(voted) / double(ds.n()) : 0.0;
    out[k].accuracy = voted ? double(correct) / double(voted) : 0.0;
  }
  return out;
}

}  // namespace wsfuse
