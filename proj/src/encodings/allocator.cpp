#include "hyperres/encodings/allocator.hpp"

#include <algorithm>
#include <charconv>
#include <string_view>

namespace hyperres
{
    VirtualPackageAllocator VirtualPackageAllocator::after(const std::vector<PackageId>& existing)
    {
        std::size_t next = 0;
        const std::string_view pre = prefix;
        for (const auto& p : existing)
        {
            std::string_view name = p.name;
            if (!name.starts_with(pre))
            {
                continue;
            }
            name.remove_prefix(pre.size());
            std::size_t n = 0;
            auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), n);
            if (ec == std::errc{} && ptr == name.data() + name.size())
            {
                next = std::max(next, n + 1);
            }
        }
        return VirtualPackageAllocator(next);
    }

    bool is_reserved_name(const std::string& name)
    {
        return !name.empty() && name.front() == '~';
    }
}
