#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hyperres/core/hypergraph.hpp"

namespace hyperres
{
    /**
     * Hands out virtual package ids `~v<N>` with the empty version. The `~`
     * prefix is reserved, so names never clash with repository packages.
     * Seeding from existing parts continues past the largest `~v<N>`
     * already present, which keeps repeated transforms collision free.
     */
    class VirtualPackageAllocator
    {
    public:
        static constexpr const char* prefix = "~v";

        VirtualPackageAllocator() = default;

        explicit VirtualPackageAllocator(std::size_t next)
            : m_next(next)
        {
        }

        static VirtualPackageAllocator after(const std::vector<PackageId>& existing);

        PackageId next(const std::string& ecosystem)
        {
            return {ecosystem, prefix + std::to_string(m_next++), ""};
        }

        [[nodiscard]] std::size_t counter() const noexcept
        {
            return m_next;
        }

    private:
        std::size_t m_next = 0;
    };

    /// True for names in the reserved `~` namespace.
    [[nodiscard]] bool is_reserved_name(const std::string& name);
}
