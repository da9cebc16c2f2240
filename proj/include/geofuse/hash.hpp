#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace geofuse {

/// 64-bit FNV-1a. Only used for cache keys, never for security.
class Fnv1a
{
public:
    void update(const void* data, std::size_t size)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            m_state ^= p[i];
            m_state *= 0x100000001b3ULL;
        }
    }

    template <typename T>
    void update_value(const T& value)
    {
        update(&value, sizeof(T));
    }

    void update(std::string_view s) { update(s.data(), s.size()); }

    std::uint64_t digest() const { return m_state; }

private:
    std::uint64_t m_state = 0xcbf29ce484222325ULL;
};

inline std::string hex_digest(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::uint64_t hash_bytes(std::string_view s)
{
    Fnv1a h;
    h.update(s);
    return h.digest();
}

} // namespace geofuse
