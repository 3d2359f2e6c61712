#include "sgn/data_io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "sgn/rng.hpp"

namespace sgn {

namespace {

struct Entry {
  int row;
  int col;
  double value;
};

double parse_label(const std::string& token, int line) {
  std::size_t pos = 0;
  double value = 0;
  try {
    value = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, "non-numeric label '" + token + "'");
  }
  if (pos != token.size()) {
    throw ParseError(line, "non-numeric label '" + token + "'");
  }
  if (value == 1.0) return 1.0;
  if (value == -1.0) return -1.0;
  if (value == 0.0) return -1.0;  // {0,1} convention normalized to {-1,+1}
  throw ParseError(line, "label '" + token + "' is not in {-1,0,+1}; " +
                             "multi-class data is not supported");
}

}  // namespace

Dataset parse_libsvm(std::istream& in, int dimension_override) {
  std::vector<double> labels;
  std::vector<Entry> entries;
  int max_index = 0;
  int line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream tokens(line);
    std::string label_token;
    if (!(tokens >> label_token)) continue;  // blank line
    const int row = static_cast<int>(labels.size());
    labels.push_back(parse_label(label_token, line_no));
    int last_index = 0;
    std::string pair;
    while (tokens >> pair) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) {
        throw ParseError(line_no, "expected index:value, got '" + pair + "'");
      }
      int index = 0;
      double value = 0;
      std::size_t pos = 0;
      try {
        index = std::stoi(pair.substr(0, colon), &pos);
      } catch (const std::exception&) {
        throw ParseError(line_no, "non-numeric index in '" + pair + "'");
      }
      if (pos != colon) {
        throw ParseError(line_no, "non-numeric index in '" + pair + "'");
      }
      if (index <= 0) {
        throw ParseError(line_no,
                         "index must be positive, got " + std::to_string(index));
      }
      if (index <= last_index) {
        throw ParseError(line_no, "indices must be strictly increasing, got " +
                                      std::to_string(index) + " after " +
                                      std::to_string(last_index));
      }
      const std::string value_token = pair.substr(colon + 1);
      try {
        value = std::stod(value_token, &pos);
      } catch (const std::exception&) {
        throw ParseError(line_no, "non-numeric value in '" + pair + "'");
      }
      if (pos != value_token.size()) {
        throw ParseError(line_no, "non-numeric value in '" + pair + "'");
      }
      if (dimension_override > 0 && index > dimension_override) {
        throw ParseError(line_no,
                         "feature index " + std::to_string(index) +
                             " exceeds pinned dimension " +
                             std::to_string(dimension_override));
      }
      last_index = index;
      max_index = std::max(max_index, index);
      entries.push_back({row, index - 1, value});
    }
  }
  Dataset ds;
  ds.n = static_cast<int>(labels.size());
  ds.d = dimension_override > 0 ? dimension_override : max_index;
  ds.labels = Eigen::Map<const Eigen::VectorXd>(labels.data(), ds.n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(entries.size());
  for (const Entry& e : entries) triplets.emplace_back(e.row, e.col, e.value);
  ds.features.resize(ds.n, ds.d);
  ds.features.setFromTriplets(triplets.begin(), triplets.end());
  ds.features.makeCompressed();
  return ds;
}

namespace {

bool is_gzip(const std::string& bytes) {
  return bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
         static_cast<unsigned char>(bytes[1]) == 0x8b;
}

std::string gunzip(const std::string& raw) {
  z_stream stream{};
  if (inflateInit2(&stream, 15 + 32) != Z_OK) {
    throw std::runtime_error("gunzip: inflateInit failed");
  }
  std::string out;
  std::vector<char> buffer(1 << 16);
  stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
  stream.avail_in = static_cast<uInt>(raw.size());
  int rc = Z_OK;
  do {
    stream.next_out = reinterpret_cast<Bytef*>(buffer.data());
    stream.avail_out = static_cast<uInt>(buffer.size());
    rc = inflate(&stream, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&stream);
      throw std::runtime_error("gunzip: corrupt gzip stream");
    }
    out.append(buffer.data(), buffer.size() - stream.avail_out);
  } while (rc != Z_STREAM_END);
  inflateEnd(&stream);
  return out;
}

}  // namespace

Dataset parse_libsvm_file(const std::string& path, int dimension_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream raw;
  raw << in.rdbuf();
  std::string bytes = raw.str();
  if (is_gzip(bytes)) bytes = gunzip(bytes);
  std::istringstream text(bytes);
  return parse_libsvm(text, dimension_override);
}

void write_libsvm(const Dataset& ds, std::ostream& out) {
  char buf[64];
  for (int i = 0; i < ds.n; ++i) {
    out << (ds.labels[i] > 0 ? "1" : "-1");
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             ds.features, i);
         it; ++it) {
      std::snprintf(buf, sizeof(buf), "%.17g", it.value());
      out << ' ' << (it.col() + 1) << ':' << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_libsvm: output stream failed");
}

Dataset synth_logistic(int n, int d, double condition, std::uint64_t seed) {
  if (n < 1 || d < 1) {
    throw std::invalid_argument("synth_logistic: n and d must be >= 1");
  }
  if (condition < 1.0) {
    throw std::invalid_argument("synth_logistic: condition must be >= 1");
  }
  // Second-moment eigenvalues geometrically spaced in [1, condition],
  // rescaled so their sum is d (feature scale independent of condition).
  Eigen::VectorXd spectrum(d);
  for (int j = 0; j < d; ++j) {
    spectrum[j] =
        d == 1 ? 1.0
               : std::pow(condition, static_cast<double>(j) / (d - 1));
  }
  spectrum *= static_cast<double>(d) / spectrum.sum();
  const Eigen::VectorXd scale = spectrum.cwiseSqrt();

  CounterRng planted(seed, 0x706c616e74ull);
  Eigen::VectorXd w(d);
  for (int j = 0; j < d; ++j) w[j] = planted.normal();

  Dataset ds;
  ds.n = n;
  ds.d = d;
  ds.labels.resize(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i) + 1);
    double margin = 0.0;
    for (int j = 0; j < d; ++j) {
      const double value = scale[j] * rng.normal();
      margin += value * w[j];
      triplets.emplace_back(i, j, value);
    }
    double label = margin >= 0 ? 1.0 : -1.0;
    if (rng.uniform() < 0.1) label = -label;  // 10% label noise
    ds.labels[i] = label;
  }
  ds.features.resize(n, d);
  ds.features.setFromTriplets(triplets.begin(), triplets.end());
  ds.features.makeCompressed();
  return ds;
}

}  // namespace sgn
