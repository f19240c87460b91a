#include "articgan/train/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "articgan/error.hpp"
#include "articgan/physical/physical_model.hpp"

namespace artic {

namespace {

// Smooth 0 -> 1 step centred at `centre` frames with the given width.
double ramp(double t, double centre, double width) { return 0.5 * (1.0 + std::tanh((t - centre) / width)); }

}  // namespace

EmaTrajectory synthetic_word(std::size_t index) {
  if (index >= kSyntheticWords) {
    throw ContractViolation("synthetic word index " + std::to_string(index) + " out of range");
  }
  const double w = static_cast<double>(index);
  const double onset = 40.0 + 6.0 * w;
  const double release = 190.0 - 5.0 * w;
  // Vowel targets spread over the tongue-body space.
  const double tb_x_target = std::cos(2.0 * std::numbers::pi * w / 8.0) * 0.7;
  const double tb_y_target = std::sin(2.0 * std::numbers::pi * w / 8.0) * 0.7;
  const bool labial = index % 2 == 0;

  auto traj = EmaTrajectory::zeros(kSyntheticFrames);
  for (std::size_t f = 0; f < kSyntheticFrames; ++f) {
    const double t = static_cast<double>(f);
    const double vowel = ramp(t, onset, 8.0) * (1.0 - ramp(t, release, 10.0));
    const double closure = 1.0 - ramp(t, onset, 4.0);
    const double wobble = 0.08 * vowel * std::sin(2.0 * std::numbers::pi * t / (60.0 + 4.0 * w));
    auto& c = traj.channels;
    c[0][f] = -0.1 + 0.05 * vowel;
    c[1][f] = -0.3 - 0.2 * vowel;
    c[2][f] = 0.1 + (labial ? 0.15 * closure : 0.0);
    c[3][f] = labial ? 0.1 - 0.3 * closure + 0.3 * vowel : 0.2 + 0.2 * vowel;
    c[4][f] = 0.05 + (labial ? 0.1 * closure : 0.0);
    c[5][f] = labial ? 0.1 + 0.3 * closure - 0.4 * vowel : -0.1 - 0.3 * vowel;
    c[6][f] = 0.2 * vowel + (labial ? 0.0 : 0.4 * closure);
    c[7][f] = labial ? -0.2 + 0.1 * vowel : 0.6 * closure - 0.2;
    c[8][f] = tb_x_target * vowel + wobble;
    c[9][f] = tb_y_target * vowel - wobble;
    c[10][f] = 0.5 * tb_x_target * vowel - 0.2;
    c[11][f] = 0.3 * tb_y_target * vowel + 0.1;
    c[12][f] = 2.0 * ramp(t, onset + 5.0, 3.0) * (1.0 - ramp(t, release + 15.0, 5.0)) - 1.0;
  }
  return traj;
}

Dataset synthetic_dataset(std::uint64_t physical_seed) {
  const PhysicalModel model({PhysicalKind::kSourceFilter, physical_seed});
  Dataset ds;
  for (std::size_t i = 0; i < kSyntheticWords; ++i) {
    ds.names.push_back("word" + std::to_string(i) + ".wav");
    ds.items.push_back(model.synthesize(synthetic_word(i)).samples);
  }
  return ds;
}

}  // namespace artic
