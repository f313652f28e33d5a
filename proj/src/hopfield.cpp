#include "amem/hopfield.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "amem/errors.hpp"

namespace amem {

WeightMatrix::WeightMatrix(std::size_t n, std::vector<double> values) : n_(n), w_(std::move(values)) {
  if (w_.size() != n * n) throw DimensionError("weight matrix needs N*N values");
}

void WeightMatrix::zero_diagonal() {
  for (std::size_t i = 0; i < n_; ++i) w_[i * n_ + i] = 0.0;
}

bool WeightMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if ((*this)(i, j) != (*this)(j, i)) return false;
    }
  }
  return true;
}

void WeightMatrix::validate() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0.0) throw NumericDomainError("weight matrix has a non-zero diagonal entry");
  }
  for (double v : w_) {
    if (!std::isfinite(v)) throw NumericDomainError("weight matrix has a non-finite entry");
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kFixedPoint: return "fixed_point";
    case Termination::kLimitCycle: return "limit_cycle";
    case Termination::kMaxIterations: return "max_iterations";
  }
  return "unknown";
}

std::vector<double> recurrent_drive(const WeightMatrix& w, std::span<const std::int8_t> state) {
  const std::size_t n = w.size();
  if (state.size() != n) throw DimensionError("recurrent_drive: state length does not match N");
  std::vector<double> drive(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = w.row(i).data();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * state[j];
    drive[i] = acc;
  }
  return drive;
}

State step_sync(const WeightMatrix& w, std::span<const std::int8_t> state) {
  const std::vector<double> drive = recurrent_drive(w, state);
  State next(drive.size());
  for (std::size_t i = 0; i < drive.size(); ++i) next[i] = drive[i] >= 0.0 ? 1 : -1;
  return next;
}

State step_sequential(const WeightMatrix& w, std::span<const std::int8_t> state) {
  if (state.size() != w.size()) throw DimensionError("step_sequential: state length does not match N");
  State next(state.begin(), state.end());
  for (std::size_t i = 0; i < next.size(); ++i) {
    const auto row = w.row(i);
    double h = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) h += row[j] * next[j];
    next[i] = h >= 0.0 ? 1 : -1;
  }
  return next;
}

RecallResult recall(const WeightMatrix& w, std::span<const std::int8_t> init, int max_iter) {
  return recall(w, init, RecallOptions{max_iter, UpdateMode::kSynchronous});
}

RecallResult recall(const WeightMatrix& w, std::span<const std::int8_t> init, const RecallOptions& options) {
  const int max_iter = options.max_iter;
  const bool sequential = options.mode == UpdateMode::kSequential;
  if (max_iter < 1) throw ParameterError("recall: max_iter must be >= 1");
  if (init.size() != w.size()) throw DimensionError("recall: init length does not match N");
  State before(init.begin(), init.end());  // state(t-1)
  State current = before;                  // state(t)
  bool have_before = false;
  for (int step = 1; step <= max_iter; ++step) {
    State next = sequential ? step_sequential(w, current) : step_sync(w, current);
    if (next == current) return {std::move(next), step, Termination::kFixedPoint};
    if (have_before && next == before) return {std::move(next), step, Termination::kLimitCycle};
    before = std::move(current);
    current = std::move(next);
    have_before = true;
  }
  return {std::move(current), max_iter, Termination::kMaxIterations};
}

WeightMatrix hebbian_train(const PatternSet& patterns) {
  const std::size_t n = patterns.size();
  WeightMatrix w(n);
  for (std::size_t p = 0; p < patterns.count(); ++p) {
    auto xi = patterns.row(p);
    for (std::size_t i = 0; i < n; ++i) {
      double* row = w.row(i).data();
      const double xi_i = xi[i];
      for (std::size_t j = 0; j < n; ++j) row[j] += xi_i * xi[j];
    }
  }
  w.zero_diagonal();
  return w;
}

namespace {

constexpr char kMagic[4] = {'A', 'M', 'W', '1'};

template <class T>
void write_le(std::ostream& out, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.write(reinterpret_cast<const char*>(bits.data()), bits.size());
}

template <class T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bits{};
  in.read(reinterpret_cast<char*>(bits.data()), bits.size());
  if (!in) throw FormatError("weight file truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

void save_weights(const std::filesystem::path& path, const WeightMatrix& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open weight file for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_le<std::uint64_t>(out, w.size());
  for (double v : w.values()) write_le<double>(out, v);
  if (!out) throw FormatError("failed writing weight file: " + path.string());
}

WeightMatrix load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open weight file: " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not an AMW1 weight file: " + path.string());
  }
  const auto n = read_le<std::uint64_t>(in);
  if (n == 0 || n > (1u << 16)) throw FormatError("implausible matrix size in weight file");
  std::vector<double> values(n * n);
  for (auto& v : values) v = read_le<double>(in);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in weight file");
  return WeightMatrix(n, std::move(values));
}

void export_weights_text(const std::filesystem::path& path, const WeightMatrix& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open file for writing: " + path.string());
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto row = w.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ' ';
      out << format_double(row[j]);
    }
    out << '\n';
  }
}

WeightMatrix import_weights_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path.string());
  std::vector<double> values;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw FormatError("bad number in weight text file");
      values.push_back(v);
      p = next;
    }
    ++rows;
  }
  if (rows * rows != values.size()) throw FormatError("weight text file is not square");
  return WeightMatrix(rows, std::move(values));
}

}  // namespace amem
