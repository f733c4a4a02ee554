#pragma once

#include <dimerq/constants.hpp>
#include <dimerq/core.hpp>
#include <dimerq/error.hpp>
#include <dimerq/fitting.hpp>
#include <dimerq/models.hpp>
#include <dimerq/quantifiers.hpp>
#include <dimerq/sweep.hpp>
#include <dimerq/table.hpp>
#include <dimerq/version.hpp>
