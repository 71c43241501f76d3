#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace storesim {

struct Uuid {
  std::array<std::uint8_t, 16> bytes{};

  // Canonical lower-case 8-4-4-4-12 form.
  std::string str() const;

  bool operator==(const Uuid&) const = default;
};

// Name-based (RFC 4122 version 5, SHA-1) UUID. Same namespace + name always
// produce the same id, which is what makes experiment output reproducible
// while ids stay globally unique in practice.
Uuid uuid5(const Uuid& ns, std::string_view name);

// Project namespace all simulation / job ids hang off.
const Uuid& storesim_namespace();

// Raw SHA-1, exposed for tests against the published vectors.
std::array<std::uint8_t, 20> sha1(std::string_view data);

}  // namespace storesim
