#include "qcmab/states.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qcmab {

namespace {

/// e^{i phi} with the same quarter-turn snapping as rotation_entries, so
/// psi2(pi) is the singlet bit-for-bit.
Complex unit_phase(double phi) {
  const RotationEntries e = rotation_entries(phi);
  return {e.c, e.s};
}

int mirror_index(int index, int n_players) {
  return index ^ ((1 << n_players) - 1);
}

void check_sign(int sign, const char* what) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument(std::string(what) + " must be +1 or -1");
}

}  // namespace

StateVector psi2(double phi) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
  const double r = 1.0 / std::sqrt(2.0);
  amps(parse_outcome_label("HV")) = r;
  amps(parse_outcome_label("VH")) = r * unit_phase(phi);
  return StateVector(2, std::move(amps));
}

StateVector singlet() { return psi2(pi); }

StateVector psi3(int z_sign, int i_sign) {
  check_sign(z_sign, "z_sign");
  check_sign(i_sign, "i_sign");
  const double half_sqrt3 = std::sqrt(3.0) / 2.0;
  const Complex z(-0.5, z_sign * half_sqrt3);
  const Complex i_factor(0.0, static_cast<double>(i_sign));
  const double r = 1.0 / std::sqrt(6.0);

  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(8);
  const int weight1[3] = {parse_outcome_label("HHV"),
                          parse_outcome_label("HVH"),
                          parse_outcome_label("VHH")};
  Complex zk = 1.0;
  for (int k = 0; k < 3; ++k) {
    amps(weight1[k]) = r * zk;
    amps(mirror_index(weight1[k], 3)) = r * i_factor * zk;
    zk *= z;
  }
  return StateVector(3, std::move(amps));
}

StateVector s4(int z_sign) {
  check_sign(z_sign, "z_sign");
  const double half_sqrt3 = std::sqrt(3.0) / 2.0;
  const Complex z(-0.5, z_sign * half_sqrt3);
  const double r = 1.0 / std::sqrt(6.0);

  // Outcome pairs grouped by the separation of their two V photons; each
  // pair is mirror-symmetric and carries z^k.
  const char* pair_labels[3][2] = {
      {"HHVV", "VVHH"}, {"HVHV", "VHVH"}, {"HVVH", "VHHV"}};
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(16);
  Complex zk = 1.0;
  for (int k = 0; k < 3; ++k) {
    amps(parse_outcome_label(pair_labels[k][0])) = r * zk;
    amps(parse_outcome_label(pair_labels[k][1])) = r * zk;
    zk *= z;
  }
  return StateVector(4, std::move(amps));
}

StateVector a4(double phi, int branch) {
  check_sign(branch, "branch");
  const Complex ph = unit_phase(phi);
  const double r = 1.0 / std::sqrt(8.0);
  const Complex coeffs_plus[4] = {1.0, ph, -1.0, -ph};
  const Complex coeffs_minus[4] = {1.0, ph, -ph, -1.0};
  const Complex* coeffs = (branch == 1) ? coeffs_plus : coeffs_minus;

  const int weight1[4] = {
      parse_outcome_label("HHHV"), parse_outcome_label("HHVH"),
      parse_outcome_label("HVHH"), parse_outcome_label("VHHH")};
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(16);
  for (int k = 0; k < 4; ++k) {
    amps(weight1[k]) = r * coeffs[k];
    amps(mirror_index(weight1[k], 4)) = -r * coeffs[k];
  }
  return StateVector(4, std::move(amps));
}

void save_state(const StateVector& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw StateIoError("cannot open " + path + " for writing");
  char buf[64];
  out << "{\n  \"n_players\": " << state.n_players << ",\n  \"amplitudes\": [";
  for (int k = 0; k < state.dimension(); ++k) {
    const Complex a = state.amplitudes(k);
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", a.real(), a.imag());
    out << (k == 0 ? "\n    " : ",\n    ") << buf;
  }
  out << "\n  ]\n}\n";
  if (!out) throw StateIoError("write to " + path + " failed");
}

StateVector load_state(const std::string& path, std::string* warning) {
  std::ifstream in(path);
  if (!in) throw StateIoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw StateIoError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("n_players") ||
      !doc.contains("amplitudes"))
    throw StateIoError(path + ": expected object with n_players, amplitudes");
  if (!doc["n_players"].is_number_integer())
    throw StateIoError(path + ": n_players must be an integer");
  const int n = doc["n_players"].get<int>();
  if (n < 1 || n > max_players)
    throw StateIoError(path + ": n_players " + std::to_string(n) +
                       " outside [1, " + std::to_string(max_players) + "]");
  const auto& arr = doc["amplitudes"];
  if (!arr.is_array() || static_cast<int>(arr.size()) != (1 << n))
    throw StateIoError(path + ": expected " + std::to_string(1 << n) +
                       " amplitudes for " + std::to_string(n) + " players");
  Eigen::VectorXcd amps(1 << n);
  for (int k = 0; k < (1 << n); ++k) {
    const auto& entry = arr[k];
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number())
      throw StateIoError(path + ": amplitude " + std::to_string(k) +
                         " must be [re, im]");
    amps(k) = Complex(entry[0].get<double>(), entry[1].get<double>());
  }

  StateVector state(n, std::move(amps));
  const double dev = std::abs(state.norm() - 1.0);
  if (dev > 1e-3)
    throw StateIoError(path + ": norm " + std::to_string(state.norm()) +
                       " too far from 1 to repair");
  if (dev > 1e-6) {
    if (warning)
      *warning = path + ": norm deviates by " + std::to_string(dev) +
                 ", renormalizing";
    state.amplitudes /= state.norm();
  }
  return state;
}

StateVector state_from_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  // "file:" keeps the remainder verbatim; paths may contain ':'.
  if (spec.rfind("file:", 0) == 0)
    return load_state(spec.substr(5));
  while (true) {
    const std::size_t colon = spec.find(':', start);
    if (colon == std::string::npos) {
      parts.push_back(spec.substr(start));
      break;
    }
    parts.push_back(spec.substr(start, colon - start));
    start = colon + 1;
  }

  auto parse_sign = [&](const std::string& s) {
    if (s == "+") return +1;
    if (s == "-") return -1;
    throw std::invalid_argument("state spec " + spec +
                                ": sign must be + or -");
  };
  auto parse_phase_deg = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != s.size())
      throw std::invalid_argument("state spec " + spec + ": bad phase " + s);
    return deg_to_rad(v);
  };

  const std::string& family = parts[0];
  if (family == "singlet" && parts.size() == 1) return singlet();
  if (family == "psi2" && parts.size() == 2)
    return psi2(parse_phase_deg(parts[1]));
  if (family == "psi3") {
    if (parts.size() == 1) return psi3();
    if (parts.size() == 2) {
      const std::size_t comma = parts[1].find(',');
      if (comma != std::string::npos)
        return psi3(parse_sign(parts[1].substr(0, comma)),
                    parse_sign(parts[1].substr(comma + 1)));
    }
  }
  if (family == "s4") {
    if (parts.size() == 1) return s4();
    if (parts.size() == 2) return s4(parse_sign(parts[1]));
  }
  if (family == "a4") {
    if (parts.size() == 2) return a4(parse_phase_deg(parts[1]));
    if (parts.size() == 3)
      return a4(parse_phase_deg(parts[1]), parse_sign(parts[2]));
  }
  throw std::invalid_argument(
      "unknown state spec \"" + spec +
      "\"; expected singlet | psi2:<phi_deg> | psi3[:<+|->,<+|->] | "
      "s4[:<+|->] | a4:<phi_deg>[:<+|->] | file:<path>");
}

}  // namespace qcmab
