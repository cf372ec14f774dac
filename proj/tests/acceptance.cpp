#include <algorithm>
#include <iostream>
#include <thread>

#include "sumrange/battery.hpp"

int main()
{
    sumrange::BatteryOptions opt;
    opt.jobs = std::max(1u, std::thread::hardware_concurrency());
    bool ok = true;
    sumrange::run_battery(opt, [&](const sumrange::CriterionResult& r) {
        sumrange::write_criterion_line(std::cout, r);
        std::cout.flush();
        ok = ok && r.passed;
    });
    return ok ? 0 : 1;
}
