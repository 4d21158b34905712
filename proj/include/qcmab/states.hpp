// Constructors for the shipped entangled states and state-file round-trip.
//
// Families, with amplitudes in the MSB-first basis of state.hpp:
//   psi2(phi)      (|HV> + e^{i phi}|VH>)/sqrt(2); singlet() is psi2(pi).
//   psi3(zs, is)   three photons, weight-1 triple (1, z, z^2)/sqrt(6) with
//                  z = e^{zs * 2 pi i / 3}, mirror triple carried with a
//                  factor is * i.
//   s4(zs)         four photons, weight-2 sector, coefficient z^k/sqrt(6) on
//                  the pair of outcomes whose V positions are k apart.
//   a4(phi, br)    four photons, weight-1 quadruple (1, e^{i phi}, -1,
//                  -e^{i phi})/sqrt(8) (br = +1) or (1, e^{i phi},
//                  -e^{i phi}, -1)/sqrt(8) (br = -1), mirror quadruple
//                  negated.

#pragma once

#include <string>

#include "qcmab/state.hpp"

namespace qcmab {

StateVector psi2(double phi);
StateVector singlet();

/// z_sign and i_sign are +1 or -1.
StateVector psi3(int z_sign = +1, int i_sign = +1);

StateVector s4(int z_sign = +1);

/// branch is +1 or -1.
StateVector a4(double phi, int branch = +1);

/// File and format problems when reading or writing states.
class StateIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes {"n_players": N, "amplitudes": [[re, im], ...]} with 17 significant
/// digits per component, enough for doubles to round-trip exactly.
void save_state(const StateVector& state, const std::string& path);

/// Reads a state file. Norm policy on |  ||v|| - 1  |: up to 1e-6 the
/// amplitudes are taken as-is, up to 1e-3 the state is renormalized and a
/// message is placed in *warning, above that a StateIoError is thrown.
StateVector load_state(const std::string& path, std::string* warning = nullptr);

/// Parses a state selector used at external interfaces:
///   "singlet" | "psi2:<phi_deg>" | "psi3[:<+|->,<+|->]" | "s4[:<+|->]" |
///   "a4:<phi_deg>[:<+|->]" | "file:<path>"
/// Phases are given in degrees, like every other angle crossing a boundary.
StateVector state_from_spec(const std::string& spec);

}  // namespace qcmab
