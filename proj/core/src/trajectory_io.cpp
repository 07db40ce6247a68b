#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "permqfi/atomic_file.hpp"
#include "permqfi/error.hpp"
#include "permqfi/evolution.hpp"

namespace permqfi {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'Q', 'F', 'I', 'T', 'R', 'J', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw IoError("truncated trajectory file");
  return value;
}

}  // namespace

void write_trajectories(const std::filesystem::path& path, std::span<const Trajectory* const> series,
                        double metadata) {
  if (series.empty() || series.front()->snapshots.empty()) throw InvalidArgument("nothing to write");
  const Trajectory& first = *series.front();
  const auto support = first.snapshots.front().shared_support();
  for (const Trajectory* t : series) {
    if (t->times != first.times || t->snapshots.size() != first.times.size()) {
      throw InvalidArgument("all series must share one time grid");
    }
    for (const DensityState& s : t->snapshots) {
      if (s.shared_support() != support && s.support().flat_indices() != support->flat_indices()) {
        throw InvalidArgument("all snapshots must share one support");
      }
    }
  }

  // write to a sibling temporary and rename so readers never see a partial file
  const std::filesystem::path tmp = temp_sibling(path);
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(support->layout().num_qubits()));
    put<std::uint64_t>(os, support->size());
    put<std::uint64_t>(os, first.times.size());
    put<std::uint32_t>(os, static_cast<std::uint32_t>(series.size()));
    put<std::uint32_t>(os, 0);
    put<double>(os, metadata);
    for (std::size_t f : support->flat_indices()) put<std::uint64_t>(os, f);
    os.write(reinterpret_cast<const char*>(first.times.data()),
             static_cast<std::streamsize>(first.times.size() * sizeof(double)));
    for (const Trajectory* t : series) {
      for (const DensityState& s : t->snapshots) {
        os.write(reinterpret_cast<const char*>(s.values().data()),
                 static_cast<std::streamsize>(s.values().size() * sizeof(Complex)));
      }
    }
    if (!os) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move trajectory file into place");
  }
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path, double* metadata) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw IoError(path.string() + " is not a trajectory file");
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) throw IoError("unsupported trajectory format version " + std::to_string(version));
  const auto n_qubits = get<std::uint32_t>(is);
  const auto support_size = get<std::uint64_t>(is);
  const auto n_times = get<std::uint64_t>(is);
  const auto n_series = get<std::uint32_t>(is);
  (void)get<std::uint32_t>(is);
  const auto meta = get<double>(is);
  if (metadata) *metadata = meta;

  auto layout = build_layout(static_cast<int>(n_qubits));
  std::vector<std::size_t> flat(support_size);
  for (auto& f : flat) f = static_cast<std::size_t>(get<std::uint64_t>(is));
  auto support = Support::from_flat(layout, std::move(flat));

  std::vector<double> times(n_times);
  is.read(reinterpret_cast<char*>(times.data()), static_cast<std::streamsize>(n_times * sizeof(double)));
  if (!is) throw IoError("truncated trajectory file");

  std::vector<Trajectory> out(n_series);
  for (Trajectory& t : out) {
    t.times = times;
    t.snapshots.reserve(n_times);
    for (std::uint64_t i = 0; i < n_times; ++i) {
      Eigen::VectorXcd values(static_cast<Eigen::Index>(support_size));
      is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(support_size * sizeof(Complex)));
      if (!is) throw IoError("truncated trajectory file");
      t.snapshots.emplace_back(support, std::move(values));
    }
  }
  return out;
}

void write_pair_trajectory(const std::filesystem::path& path, const PairTrajectory& pair) {
  const std::array<const Trajectory*, 2> series = {&pair.plus, &pair.minus};
  write_trajectories(path, series, pair.delta);
}

PairTrajectory read_pair_trajectory(const std::filesystem::path& path) {
  PairTrajectory pair;
  auto series = read_trajectories(path, &pair.delta);
  if (series.size() != 2) throw IoError(path.string() + " does not hold a trajectory pair");
  pair.plus = std::move(series[0]);
  pair.minus = std::move(series[1]);
  return pair;
}

}  // namespace permqfi
