#pragma once

#include "l1atf/column.hpp"
#include "l1atf/dictionary.hpp"
#include "l1atf/error.hpp"
#include "l1atf/oracle.hpp"
#include "l1atf/problem.hpp"
#include "l1atf/selection.hpp"
#include "l1atf/signals.hpp"
#include "l1atf/solver.hpp"
