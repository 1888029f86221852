#include "csbss/content_hash.hpp"

#include <fstream>
#include <iterator>
#include <memory>
#include <vector>

#include <openssl/evp.h>

#include "csbss/errors.hpp"

namespace csbss {

namespace {

std::string digest_hex(const EVP_MD* md, std::span<const unsigned char> prefix,
                       std::span<const unsigned char> bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), prefix.data(), prefix.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out, &len) != 1) {
    throw Error("digest computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[out[i] >> 4]);
    hex.push_back(kHex[out[i] & 0xF]);
  }
  return hex;
}

}  // namespace

std::string git_blob_hash(std::span<const unsigned char> bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
  return digest_hex(EVP_sha1(),
                    {reinterpret_cast<const unsigned char*>(header.data()), header.size()}, bytes);
}

std::string git_blob_hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  return git_blob_hash(bytes);
}

std::string parameter_hash(const Eigen::VectorXf& parameters) {
  return git_blob_hash({reinterpret_cast<const unsigned char*>(parameters.data()),
                        static_cast<std::size_t>(parameters.size()) * sizeof(float)});
}

std::string sha256_hex(std::span<const unsigned char> bytes) {
  return digest_hex(EVP_sha256(), {}, bytes);
}

}  // namespace csbss
