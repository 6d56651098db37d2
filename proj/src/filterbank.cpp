// Copyright 2026 The Scaloforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "scaloforge/filterbank.hpp"

#include <cmath>
#include <string>

#include "scaloforge/error.hpp"

namespace scaloforge {
namespace {

// Absorbs log2 rounding when the closed form lands exactly on an integer.
constexpr double kFloorSlack = 1e-9;

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void WaveletScaleParams::validate() const {
  if (q < 1) fail(ErrorCode::invalid_argument, "Q must be at least 1");
  if (!(t_max > 0.0)) fail(ErrorCode::invalid_argument, "T_max must be positive");
  if (t_max * f_high <= 2.0 * q) {
    fail(ErrorCode::scale_degenerate, "T_max * f_h = " + std::to_string(t_max * f_high) +
                                          " must exceed 2Q = " + std::to_string(2 * q));
  }
  if (!(f_low >= 0.0) || !(f_low < boundary_frequency())) {
    fail(ErrorCode::invalid_argument,
         "f_l must lie in [0, 2Q/T_max = " + std::to_string(boundary_frequency()) + ")");
  }
}

double constant_q_count_real(const WaveletScaleParams& params) {
  return 1.0 + params.q * std::log2(params.t_max * params.f_high / (2.0 * params.q));
}

int count_constant_q(const WaveletScaleParams& params) {
  params.validate();
  return static_cast<int>(std::floor(constant_q_count_real(params) + kFloorSlack));
}

int count_evenly_spaced(int q) {
  if (q < 1) fail(ErrorCode::invalid_argument, "Q must be at least 1");
  const double p = 1.0 / (std::exp2(1.0 / q) - 1.0);
  return static_cast<int>(std::floor(p + kFloorSlack));
}

FilterBank build_wavelet_scale(const WaveletScaleParams& params, FilterShape shape) {
  const int k = count_constant_q(params);
  const int p = count_evenly_spaced(params.q);
  const int total = k + p;
  const double boundary = params.boundary_frequency();

  FilterBank bank;
  bank.scale_kind = ScaleKind::wavelet;
  bank.shape = shape;
  bank.constant_q_count = k;
  bank.evenly_spaced_count = p;
  bank.lower_edge = 0.0;
  bank.upper_edge = params.f_high;
  bank.centers.resize(static_cast<std::size_t>(total));
  bank.bandwidths.resize(static_cast<std::size_t>(total));
  for (int j = 0; j < p; ++j) {
    bank.centers[j] = params.f_low + (boundary - params.f_low) * j / p;
    bank.bandwidths[j] = 2.0 / params.t_max;
  }
  for (int j = p; j < total; ++j) {
    bank.centers[j] = boundary * std::exp2(static_cast<double>(j - p) / params.q);
    bank.bandwidths[j] = bank.centers[j] / params.q;
  }
  bank.params = {{"f_high", params.f_high},
                 {"f_low", params.f_low},
                 {"t_max", params.t_max},
                 {"q", params.q}};
  return bank;
}

double hz_to_mel(double hz) noexcept { return 781.0 * std::log2(1.0 + hz / 700.0); }

double mel_to_hz(double mel) noexcept { return 700.0 * (std::exp2(mel / 781.0) - 1.0); }

FilterBank build_mel_scale(double f_low, double f_high, int n_mel) {
  if (!(f_low >= 0.0) || !(f_low < f_high)) {
    fail(ErrorCode::invalid_argument, "Mel scale needs 0 <= f_l < f_h");
  }
  if (n_mel < 1) fail(ErrorCode::invalid_argument, "N_mel must be at least 1");
  const double m_low = hz_to_mel(f_low);
  const double m_high = hz_to_mel(f_high);
  FilterBank bank;
  bank.scale_kind = ScaleKind::mel;
  bank.shape = FilterShape::triangle;
  bank.constant_q_count = n_mel;
  bank.evenly_spaced_count = 0;
  bank.lower_edge = f_low;
  bank.upper_edge = f_high;
  bank.centers.resize(static_cast<std::size_t>(n_mel));
  for (int i = 0; i < n_mel; ++i) {
    bank.centers[i] = 700.0 * std::exp2(m_low / 781.0) *
                          std::exp2((m_high - m_low) * (i + 1) / (781.0 * (n_mel + 1))) -
                      700.0;
  }
  bank.bandwidths.resize(bank.centers.size());
  for (std::size_t i = 0; i < bank.centers.size(); ++i) {
    const double left = i == 0 ? bank.lower_edge : bank.centers[i - 1];
    const double right = i + 1 == bank.centers.size() ? bank.upper_edge : bank.centers[i + 1];
    bank.bandwidths[i] = 0.5 * (right - left);
  }
  bank.params = {{"f_low", f_low}, {"f_high", f_high}, {"n_mel", n_mel}};
  return bank;
}

DigitalFilterMatrix::DigitalFilterMatrix(std::vector<Row> rows, std::size_t fft_size, int sample_rate)
    : rows_(std::move(rows)), fft_size_(fft_size), sample_rate_(sample_rate) {}

double DigitalFilterMatrix::weight(std::size_t j, std::size_t bin) const {
  const Row& r = rows_.at(j);
  if (bin < r.first_bin || bin >= r.first_bin + r.weights.size()) return 0.0;
  return r.weights[bin - r.first_bin];
}

std::vector<double> DigitalFilterMatrix::dense() const {
  const std::size_t bins = num_bins();
  std::vector<double> out(rows_.size() * bins, 0.0);
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    const Row& r = rows_[j];
    for (std::size_t i = 0; i < r.weights.size(); ++i) out[j * bins + r.first_bin + i] = r.weights[i];
  }
  return out;
}

DigitalFilterMatrix digitize(const FilterBank& bank, std::size_t fft_size, int sample_rate) {
  if (!is_power_of_two(fft_size)) {
    fail(ErrorCode::invalid_argument, "FFT size " + std::to_string(fft_size) + " is not a power of two");
  }
  if (sample_rate <= 0) fail(ErrorCode::invalid_argument, "sample rate must be positive");
  const double nyquist = sample_rate / 2.0;
  if (!bank.centers.empty() && bank.centers.back() > nyquist) {
    fail(ErrorCode::invalid_argument, "highest center " + std::to_string(bank.centers.back()) +
                                          " Hz exceeds Nyquist " + std::to_string(nyquist) + " Hz");
  }
  const std::size_t bins = fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(fft_size);
  std::vector<DigitalFilterMatrix::Row> rows(bank.size());
  std::vector<double> scratch(bins);
  for (std::size_t j = 0; j < bank.size(); ++j) {
    const double center = bank.centers[j];
    double peak = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      const double f = static_cast<double>(b) * bin_hz;
      double w = 0.0;
      if (bank.shape == FilterShape::gaussian) {
        const double d = (center - f) / bank.bandwidths[j];
        w = std::exp(-0.5 * d * d);
        if (w < kGaussianCutoff) w = 0.0;
      } else {
        const double left = j == 0 ? bank.lower_edge : bank.centers[j - 1];
        const double right = j + 1 == bank.size() ? bank.upper_edge : bank.centers[j + 1];
        if (f == center) {
          w = 1.0;
        } else if (f > left && f < center) {
          w = (f - left) / (center - left);
        } else if (f > center && f < right) {
          w = (right - f) / (right - center);
        }
      }
      scratch[b] = w;
      peak = std::max(peak, w);
    }
    if (!(peak > kDegenerateRowPeak)) {
      fail(ErrorCode::degenerate_filter,
           "filter " + std::to_string(j) + " at " + std::to_string(center) +
               " Hz has no FFT bin with weight above " + std::to_string(kDegenerateRowPeak));
    }
    std::size_t first = 0;
    while (scratch[first] == 0.0) ++first;
    std::size_t last = bins;
    while (scratch[last - 1] == 0.0) --last;
    rows[j].first_bin = first;
    rows[j].weights.assign(scratch.begin() + static_cast<std::ptrdiff_t>(first),
                           scratch.begin() + static_cast<std::ptrdiff_t>(last));
  }
  return DigitalFilterMatrix(std::move(rows), fft_size, sample_rate);
}

nlohmann::json to_json(const FilterBank& bank) {
  return {{"scale_kind", bank.scale_kind == ScaleKind::mel ? "mel" : "wavelet"},
          {"shape", bank.shape == FilterShape::triangle ? "triangle" : "gaussian"},
          {"params", bank.params},
          {"constant_q_count", bank.constant_q_count},
          {"evenly_spaced_count", bank.evenly_spaced_count},
          {"lower_edge", bank.lower_edge},
          {"upper_edge", bank.upper_edge},
          {"centers", bank.centers},
          {"bandwidths", bank.bandwidths}};
}

FilterBank filterbank_from_json(const nlohmann::json& j) {
  FilterBank bank;
  try {
    bank.scale_kind = j.at("scale_kind").get<std::string>() == "mel" ? ScaleKind::mel : ScaleKind::wavelet;
    bank.shape = j.at("shape").get<std::string>() == "triangle" ? FilterShape::triangle
                                                                : FilterShape::gaussian;
    bank.params = j.at("params");
    bank.constant_q_count = j.at("constant_q_count").get<int>();
    bank.evenly_spaced_count = j.at("evenly_spaced_count").get<int>();
    bank.lower_edge = j.at("lower_edge").get<double>();
    bank.upper_edge = j.at("upper_edge").get<double>();
    bank.centers = j.at("centers").get<std::vector<double>>();
    bank.bandwidths = j.at("bandwidths").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("filter bank JSON: ") + e.what());
  }
  if (bank.centers.size() != bank.bandwidths.size()) {
    fail(ErrorCode::schema, "filter bank JSON: centers and bandwidths differ in length");
  }
  return bank;
}

}  // namespace scaloforge
