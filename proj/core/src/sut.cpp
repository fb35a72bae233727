#include "testgen/sut.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "testgen/errors.hpp"

namespace testgen {

using detail::require;

void SyntheticSutParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  require(positive(p_idle), "synthetic sut: p_idle must be positive");
  require(positive(kappa_big), "synthetic sut: kappa_big must be positive");
  require(positive(kappa_little), "synthetic sut: kappa_little must be positive");
  require(positive(gain), "synthetic sut: gain must be positive");
}

SyntheticSut::SyntheticSut(InputSpace space, SyntheticSutParams params)
    : space_(std::move(space)), params_(params) {
  params_.validate();
  require(space_.dim(Dim::kBigFreq).levels.back() > 0.0 &&
              space_.dim(Dim::kLittleFreq).levels.back() > 0.0,
          "synthetic sut: top frequency levels must be positive");
}

double SyntheticSut::dynamic_term(const TestInput& input) const {
  require(space_.contains(input), "measure: level index out of range");
  auto cluster = [&](Dim cpus, Dim freq, Dim util, double kappa) {
    const double ratio = space_.value(input, freq) / space_.dim(freq).levels.back();
    return kappa * space_.value(input, cpus) * space_.value(input, util) * ratio * ratio * ratio;
  };
  return cluster(Dim::kBigCpus, Dim::kBigFreq, Dim::kBigUtil, params_.kappa_big) +
         cluster(Dim::kLittleCpus, Dim::kLittleFreq, Dim::kLittleUtil, params_.kappa_little);
}

double SyntheticSut::measure(const TestInput& input) const {
  return params_.p_idle + params_.gain * dynamic_term(input);
}

namespace {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string env_name(const std::string& dim_name) {
  std::string out = "TESTGEN_";
  for (char c : dim_name) {
    out += std::isalnum(static_cast<unsigned char>(c))
               ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
               : '_';
  }
  return out;
}

std::mutex& shell_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

ShellSut::ShellSut(InputSpace space, std::string command_template)
    : space_(std::move(space)), command_template_(std::move(command_template)) {
  require(!command_template_.empty(), "shell sut: empty command template");
}

std::string ShellSut::render_command(const TestInput& input) const {
  require(space_.contains(input), "shell sut: level index out of range");
  std::string cmd = command_template_;
  for (std::size_t d = 0; d < kInputDims; ++d) {
    const std::string key = "{" + space_.dims()[d].name + "}";
    const std::string val = format_number(space_.dims()[d].levels[input.level_indices[d]]);
    for (std::size_t pos = cmd.find(key); pos != std::string::npos;
         pos = cmd.find(key, pos + val.size())) {
      cmd.replace(pos, key.size(), val);
    }
  }
  std::string exports = "export";
  for (std::size_t d = 0; d < kInputDims; ++d) {
    exports += " " + env_name(space_.dims()[d].name) + "=" +
               format_number(space_.dims()[d].levels[input.level_indices[d]]);
  }
  return exports + "; " + cmd;
}

double ShellSut::measure(const TestInput& input) const {
  const std::string cmd = render_command(input);
  std::lock_guard lock(shell_mutex());

  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw IoError(command_template_, "cannot start process");
  std::string output;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe.get()) != nullptr) {
    output += buf.data();
  }
  const int status = pclose(pipe.release());
  if (status != 0) {
    throw IoError(command_template_, "process exited with status " + std::to_string(status));
  }

  std::string last;
  std::size_t start = 0;
  while (start < output.size()) {
    std::size_t end = output.find('\n', start);
    if (end == std::string::npos) end = output.size();
    std::string line = output.substr(start, end - start);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (!line.empty()) last = line;
    start = end + 1;
  }
  double watts = 0.0;
  const auto res = std::from_chars(last.data(), last.data() + last.size(), watts);
  if (last.empty() || res.ec != std::errc() || res.ptr != last.data() + last.size() ||
      !std::isfinite(watts) || watts < 0.0) {
    throw IoError(command_template_, "cannot parse power from output line '" + last + "'");
  }
  return watts;
}

double fitness(const FitnessSpec& spec, double power) {
  require(spec.p_m > 0.0, "fitness: p_m must be positive");
  require(power >= 0.0, "fitness: power must be nonnegative");
  if (power >= spec.p_m) return 1.0;
  // Keep fitness == 1 equivalent to power >= p_m even when the quotient rounds up.
  return std::min(power / spec.p_m, std::nextafter(1.0, 0.0));
}

InputSet oracle_positive_set(const Sut& sut, const InputSpace& space, const FitnessSpec& spec) {
  InputSet positives;
  for (const TestInput t : space.enumerate()) {
    if (sut.measure(t) >= spec.p_m) positives.insert(t);
  }
  return positives;
}

std::uint64_t oracle_positive_count(const Sut& sut, const InputSpace& space,
                                    const FitnessSpec& spec) {
  std::uint64_t count = 0;
  for (const TestInput t : space.enumerate()) {
    if (sut.measure(t) >= spec.p_m) ++count;
  }
  return count;
}

SyntheticSutParams calibrate_gain(const SyntheticSutParams& params, const InputSpace& space,
                                  const FitnessSpec& spec, double target_density) {
  require(target_density > 0.0 && target_density < 1.0,
          "calibrate_gain: target_density must lie in (0, 1)");
  if (!(spec.p_m > params.p_idle)) {
    throw CalibrationError("calibrate_gain: p_m must exceed p_idle");
  }

  const SyntheticSut unit(space, params);
  std::vector<double> dynamic;
  dynamic.reserve(space.cardinality());
  for (const TestInput t : space.enumerate()) dynamic.push_back(unit.dynamic_term(t));

  const auto [lo, hi] = std::minmax_element(dynamic.begin(), dynamic.end());
  if (*lo == *hi) throw CalibrationError("calibrate_gain: power is constant over the space");

  const auto n = static_cast<double>(dynamic.size());
  std::size_t k = static_cast<std::size_t>(std::ceil(target_density * n));
  k = std::clamp<std::size_t>(k, 1, dynamic.size());
  // k-th largest dynamic term.
  std::nth_element(dynamic.begin(), dynamic.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   dynamic.end(), std::greater<>());
  const double pivot = dynamic[k - 1];
  if (!(pivot > 0.0)) {
    throw CalibrationError("calibrate_gain: density unreachable, quantile point has no dynamic power");
  }

  SyntheticSutParams out = params;
  out.gain = (spec.p_m - params.p_idle) / pivot;
  while (out.p_idle + out.gain * pivot < spec.p_m) {
    out.gain = std::nextafter(out.gain, std::numeric_limits<double>::infinity());
  }
  return out;
}

}  // namespace testgen
