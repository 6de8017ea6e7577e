// One line per acceptance criterion at full scale; exit status 1 if any fails.
#include <cstdio>
#include <exception>

#include "whittaker/suites.hpp"

int main()
{
    using namespace wlab::suites;
    const Effort effort;
    int failed = 0;
    const auto& all = criteria();
    for (std::size_t k = 0; k < all.size(); ++k) {
        Check c;
        try {
            c = all[k](effort);
        } catch (const std::exception& e) {
            c.criterion = static_cast<int>(k + 1);
            c.name = "error";
            c.detail = e.what();
        }
        if (!c.pass) ++failed;
        std::printf("criterion %2d: %s %s: %s (%.1fs)\n", c.criterion, c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.c_str(), c.seconds);
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria pass\n", all.size() - failed, all.size());
    return failed == 0 ? 0 : 1;
}
