#pragma once
// Truncated convolution kernels for residue sequences mod a prime ell.
// conv_mod_ref is the serial schoolbook reference; conv_mod picks the NTT
// fast path (three word-size NTT primes + CRT) when the value bound fits.
// Both return bit-identical results by construction; tests enforce it.
#include <cstddef>
#include <vector>

#include "modl/intutil.hpp"

namespace modl {

std::vector<u64> conv_mod_ref(const std::vector<u64>& a, const std::vector<u64>& b,
                              u64 ell, std::size_t out_len);

std::vector<u64> conv_mod(const std::vector<u64>& a, const std::vector<u64>& b,
                          u64 ell, std::size_t out_len);

bool conv_ntt_applicable(u64 ell, std::size_t out_len);

// exposed for the benchmark target
std::vector<u64> conv_mod_ntt(const std::vector<u64>& a, const std::vector<u64>& b,
                              u64 ell, std::size_t out_len);

}  // namespace modl
