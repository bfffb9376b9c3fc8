namespace rcl {}
