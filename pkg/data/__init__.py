# data package: text formats, census store, report tables
