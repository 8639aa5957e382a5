# Scheduling model, file formats and command line
