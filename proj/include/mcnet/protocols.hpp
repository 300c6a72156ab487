#pragma once

#include <string>

#include "mcnet/netmodel.hpp"

namespace mcnet::protocols {

/// Two-agent teleportation: A Bell-measures the input against its half of the
/// shared pair, sends both outcomes to B, B applies the Pauli corrections.
/// Fully parameterized so relabeled copies can be composed.
struct TeleportIds {
  qnum::QubitId input = 1;
  qnum::QubitId shared_a = 2;
  qnum::QubitId shared_b = 3;
  std::string channel = "c";
  std::string recv_x2 = "x2";
  std::string recv_x1 = "x1";
  std::string agent_a = "A";
  std::string agent_b = "B";
};

net::Network teleport(const TeleportIds& ids = {});

/// A:{1}.(qc!1) | B.(qc?1) with no preparation.
net::Network direct_channel();

/// One-agent bit-flip channel X_1^{s2} M_2^{-alpha}; when `observe_outcome`
/// the measurement outcome s2 is a classical output.
net::Network bitflip(double alpha, bool observe_outcome = true);

/// A:{1}.H(1,2) | B:{3}.H(3,4): two independent local Hadamard patterns.
net::Network hadamard_pair();

/// Superdense coding: two classical bits in at A, shared pair, one qubit
/// sent, two signal bits out at B.
net::Network superdense();

/// Looks up a protocol by name; accepts "bitflip(<angle>)" with a numeric or
/// pi-based angle. Throws UnknownProtocol for anything else.
net::Network library(const std::string& name);

bool is_library_name(const std::string& name);

}  // namespace mcnet::protocols
