#pragma once

#include <trial_order/bounds.hpp>
#include <trial_order/error.hpp>
#include <trial_order/excess.hpp>
#include <trial_order/model.hpp>
#include <trial_order/oracle.hpp>
#include <trial_order/schedule.hpp>
#include <trial_order/version.hpp>
