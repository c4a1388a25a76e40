package main

import (
	"fmt"
	"plugin"
)

func main() {
	p, err := plugin.Open("./module.so")
	if err != nil {
		fmt.Println("plugin not available:", err)
		return
	}
	sym, err := p.Lookup("Run")
	if err != nil {
		fmt.Println("symbol not found:", err)
		return
	}
	sym.(func())()
}
