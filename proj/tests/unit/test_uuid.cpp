#include <doctest.h>

#include <array>
#include <cctype>
#include <sstream>
#include <string>

#include "storesim/uuid.hpp"
#include "support/oracles.hpp"

using storesim::Uuid;
using storesim::sha1;
using storesim::uuid5;

namespace {

std::string hex(const std::array<std::uint8_t, 20>& digest) {
  std::ostringstream out;
  for (auto byte : digest) {
    out << "0123456789abcdef"[byte >> 4] << "0123456789abcdef"[byte & 0xf];
  }
  return out.str();
}

// RFC 4122 DNS namespace, 6ba7b810-9dad-11d1-80b4-00c04fd430c8.
Uuid dns_namespace() {
  Uuid ns;
  ns.bytes = {0x6b, 0xa7, 0xb8, 0x10, 0x9d, 0xad, 0x11, 0xd1,
              0x80, 0xb4, 0x00, 0xc0, 0x4f, 0xd4, 0x30, 0xc8};
  return ns;
}

}  // namespace

TEST_CASE("sha1 reproduces the published FIPS vectors") {
  CHECK(hex(sha1("")) == oracle::frozen::kSha1Empty);
  CHECK(hex(sha1("abc")) == oracle::frozen::kSha1Abc);
  CHECK(hex(sha1("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
        oracle::frozen::kSha1Block);
}

TEST_CASE("sha1 handles block-boundary lengths") {
  // 55, 56 and 64 bytes straddle the padding boundary; just require
  // distinct, stable digests.
  const std::string a(55, 'x');
  const std::string b(56, 'x');
  const std::string c(64, 'x');
  CHECK(hex(sha1(a)) != hex(sha1(b)));
  CHECK(hex(sha1(b)) != hex(sha1(c)));
  CHECK(hex(sha1(a)) == hex(sha1(a)));
}

TEST_CASE("uuid5 matches the well-known DNS example") {
  CHECK(uuid5(dns_namespace(), "www.example.com").str() ==
        oracle::frozen::kUuid5Dns);
}

TEST_CASE("uuid5 sets version 5 and the RFC variant") {
  const Uuid id = uuid5(storesim::storesim_namespace(), "anything");
  CHECK((id.bytes[6] >> 4) == 5);
  CHECK((id.bytes[8] & 0xc0) == 0x80);
}

TEST_CASE("uuid5 is deterministic and name-sensitive") {
  const auto& ns = storesim::storesim_namespace();
  CHECK(uuid5(ns, "exp/job-0000/0") == uuid5(ns, "exp/job-0000/0"));
  CHECK(uuid5(ns, "exp/job-0000/0") != uuid5(ns, "exp/job-0000/1"));
  CHECK(uuid5(ns, "a") != uuid5(dns_namespace(), "a"));
}

TEST_CASE("str renders canonical lower-case 8-4-4-4-12 form") {
  const std::string s = uuid5(storesim::storesim_namespace(), "shape").str();
  REQUIRE(s.size() == 36);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      CHECK(s[i] == '-');
    } else {
      const bool hex_lower = (s[i] >= '0' && s[i] <= '9') ||
                             (s[i] >= 'a' && s[i] <= 'f');
      CHECK(hex_lower);
    }
  }
}

TEST_CASE("storesim_namespace is stable across calls") {
  CHECK(storesim::storesim_namespace() == storesim::storesim_namespace());
}
